#include "supalign/alignment.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "supalign/digest.hpp"
#include "supalign/errors.hpp"

namespace supalign {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kSha: return "sha";
    case Method::kShaR: return "sha_r";
    case Method::kRha: return "rha";
    case Method::kNone: return "none";
  }
  return "none";
}

Method parse_method(std::string_view name) {
  if (name == "sha") return Method::kSha;
  if (name == "sha_r") return Method::kShaR;
  if (name == "rha") return Method::kRha;
  if (name == "none") return Method::kNone;
  fail(ErrorKind::kInvalidArgument, "unknown method '" + std::string(name) +
                                        "' (expected sha, sha_r, rha or none)");
}

ResidualProjectionSum::ResidualProjectionSum(Eigen::Index dim)
    : sum_(Matrix::Zero(dim, dim)) {}

bool ResidualProjectionSum::add(const Matrix& kx, double epsilon, std::size_t rank,
                                const Tolerance& tol) {
  const auto projector = regularized_projector(kx, epsilon, rank, tol);
  add_complement(projector.complement());
  return projector.rank_deficient();
}

void ResidualProjectionSum::add_complement(const Matrix& complement) {
  require(complement.rows() == sum_.rows() && complement.cols() == sum_.cols(),
          ErrorKind::kInvalidArgument, "residual projection sum: dimension mismatch");
  sum_ += complement;
  ++count_;
}

namespace {

void check_training_set(const Dataset& train, std::span<const SupervisionKernel> kernels) {
  require(train.num_subjects() >= 1, ErrorKind::kInvalidArgument, "fit: no training subjects");
  require(kernels.size() == train.num_subjects(), ErrorKind::kInvalidArgument,
          "fit: expected one kernel per subject (" + std::to_string(train.num_subjects()) +
              "), got " + std::to_string(kernels.size()));
  const auto t = static_cast<Eigen::Index>(train.num_timepoints());
  const Eigen::Index rows = kernels.front().k.rows();
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    const auto& s = train.subjects[i];
    require(s.x.rows() == t && s.x.cols() == static_cast<Eigen::Index>(train.num_features()),
            ErrorKind::kInvalidArgument, "fit: subject '" + s.id + "' has mismatched shape");
    require(kernels[i].k.cols() == t, ErrorKind::kInvalidArgument,
            "fit: kernel of subject '" + s.id + "' covers " +
                std::to_string(kernels[i].k.cols()) + " time points, data has " +
                std::to_string(t));
    require(kernels[i].k.rows() == rows, ErrorKind::kInvalidArgument,
            "fit: kernels disagree on the number of rows");
  }
}

std::size_t resolve_k(const FitOptions& options, std::size_t fallback, std::size_t limit,
                      const char* what) {
  const std::size_t k = options.k.value_or(fallback);
  require(k >= 1 && k <= limit, ErrorKind::kInvalidArgument,
          std::string("fit: k = ") + std::to_string(k) + " outside [1, " +
              std::to_string(limit) + "] (" + what + ")");
  return k;
}

// Shared single-shot pipeline: U = Σ (I − P(K·X)), W = k smallest eigenvectors
// of U, G = (1/S) Σ Kᵀ W.
AlignmentModel fit_projection_sum(Method method, const Dataset& train,
                                  std::span<const SupervisionKernel> kernels, std::size_t k,
                                  const FitOptions& options) {
  const std::size_t s = train.num_subjects();
  const Eigen::Index dim = kernels.front().k.rows();
  const auto rank = static_cast<std::size_t>(
      std::min<Eigen::Index>(dim, static_cast<Eigen::Index>(train.num_features())));

  AlignmentModel model;
  model.method = method;
  model.epsilon = options.epsilon;
  model.gamma = kernels.front().gamma;
  model.k = k;
  model.subjects = s;
  model.timepoints = train.num_timepoints();
  model.features = train.num_features();
  model.classes = train.num_classes();
  FitReport& report = model.report;

  Digest digest;
  for (std::size_t i = 0; i < s; ++i) {
    digest.update(train.subjects[i].x);
    digest.update(kernels[i].k);
  }
  report.input_digest = digest.value();

  auto projector_of = [&](std::size_t i) {
    return regularized_projector(kernels[i].apply(train.subjects[i].x), options.epsilon, rank,
                                 options.tol);
  };

  ResidualProjectionSum u_sum(dim);
  std::vector<RegularizedProjector> projectors;
  std::size_t deficient_count = 0;
  auto note_deficient = [&](std::size_t, bool deficient) { deficient_count += deficient; };
  if (options.streaming) {
    for (std::size_t i = 0; i < s; ++i) {
      note_deficient(i, u_sum.add(kernels[i].apply(train.subjects[i].x), options.epsilon, rank,
                                  options.tol));
    }
  } else {
    if (options.parallel && s > 1) {
      std::vector<std::future<RegularizedProjector>> jobs;
      jobs.reserve(s);
      for (std::size_t i = 0; i < s; ++i) {
        jobs.push_back(std::async(std::launch::async, projector_of, i));
      }
      for (auto& job : jobs) projectors.push_back(job.get());
    } else {
      for (std::size_t i = 0; i < s; ++i) projectors.push_back(projector_of(i));
    }
    for (std::size_t i = 0; i < s; ++i) {
      u_sum.add_complement(projectors[i].complement());
      note_deficient(i, projectors[i].rank_deficient());
    }
  }

  if (deficient_count) {
    report.advisories.push_back("K·X is rank deficient for " + std::to_string(deficient_count) +
                                " of " + std::to_string(s) +
                                " subjects; their projectors were padded with zeros");
  }

  const SymmetricEig eig = symmetric_eig(u_sum.value(), options.tol);
  report.eigenvalues = eig.eigenvalues;
  model.w = eig.eigenvectors.leftCols(static_cast<Eigen::Index>(k));

  model.g = Matrix::Zero(kernels.front().k.cols(), model.w.cols());
  for (std::size_t i = 0; i < s; ++i) model.g += kernels[i].k.transpose() * model.w;
  model.g /= static_cast<double>(s);

  report.trace_objective = (model.w.transpose() * u_sum.value() * model.w).trace();
  std::vector<Matrix> mapped;
  mapped.reserve(s);
  double residual = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    Matrix m = options.streaming ? projector_of(i).apply(model.w) : projectors[i].apply(model.w);
    residual += (m - model.w).squaredNorm();
    mapped.push_back(std::move(m));
  }
  report.pairwise_objective = pairwise_objective(mapped);
  report.trace_form_gap = residual - report.trace_objective;

  if (s == 1) {
    report.advisories.push_back("single training subject: the template is that subject's own data");
  }
  return model;
}

}  // namespace

AlignmentModel fit_sha(const Dataset& train, std::span<const SupervisionKernel> kernels,
                       const FitOptions& options) {
  check_training_set(train, kernels);
  const auto l = static_cast<std::size_t>(kernels.front().k.rows());
  const std::size_t k = resolve_k(options, l, l, "k must not exceed the number of classes");
  return fit_projection_sum(Method::kSha, train, kernels, k, options);
}

AlignmentModel fit_rha(const Dataset& train, const FitOptions& options) {
  require(train.num_subjects() >= 1, ErrorKind::kInvalidArgument, "fit: no training subjects");
  const std::size_t t = train.num_timepoints();
  const std::size_t limit = std::min(t, train.num_features());
  const std::size_t k = resolve_k(options, limit, limit, "k must not exceed min(V, T)");
  std::vector<SupervisionKernel> kernels(train.num_subjects(), identity_kernel(t));
  check_training_set(train, kernels);
  AlignmentModel model = fit_projection_sum(Method::kRha, train, kernels, k, options);
  if (t > 2000) {
    model.report.advisories.push_back("rha assembles a " + std::to_string(t) + "x" +
                                      std::to_string(t) + " matrix; expect long runtimes");
  }
  return model;
}

AlignmentModel fit_sha_r(const Dataset& train, std::span<const SupervisionKernel> kernels,
                         const FitOptions& options) {
  check_training_set(train, kernels);
  const std::size_t s = train.num_subjects();
  const Eigen::Index l = kernels.front().k.rows();
  const std::size_t k = resolve_k(options, static_cast<std::size_t>(l),
                                  static_cast<std::size_t>(l),
                                  "k must not exceed the number of classes");
  require(options.iterations >= 1, ErrorKind::kInvalidArgument, "sha_r: iterations must be >= 1");
  require(options.epsilon >= 0.0, ErrorKind::kInvalidArgument, "sha_r: epsilon must be >= 0");
  const auto v = static_cast<Eigen::Index>(train.num_features());

  AlignmentModel model;
  model.method = Method::kShaR;
  model.epsilon = options.epsilon;
  model.gamma = kernels.front().gamma;
  model.k = k;
  model.subjects = s;
  model.timepoints = train.num_timepoints();
  model.features = train.num_features();
  model.classes = train.num_classes();
  FitReport& report = model.report;

  Digest digest;
  std::vector<Matrix> kx;
  std::vector<Eigen::LLT<Matrix>> gram;  // (K X)ᵀ K X + εI, V×V
  kx.reserve(s);
  gram.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    digest.update(train.subjects[i].x);
    digest.update(kernels[i].k);
    kx.push_back(kernels[i].apply(train.subjects[i].x));
    Matrix c = kx.back().transpose() * kx.back();
    c.diagonal().array() += options.epsilon;
    gram.emplace_back(c);
    require(gram.back().info() == Eigen::Success && gram.back().rcond() > 1e-14,
            ErrorKind::kSingularMatrix,
            "sha_r: (K X)ᵀ K X + εI is singular for subject '" + train.subjects[i].id + "'");
  }
  report.input_digest = digest.value();

  Matrix w;
  if (options.init == ShaRInit::kSha) {
    FitOptions single = options;
    single.k = k;
    w = fit_sha(train, kernels, single).w;
  } else {
    Matrix total = Matrix::Zero(l, v);
    for (const auto& m : kx) total += m;
    const SymmetricEig eig = symmetric_eig(total * total.transpose(), options.tol);
    w = eig.eigenvectors.rightCols(static_cast<Eigen::Index>(k)).rowwise().reverse();
  }

  auto ridge_map = [&](std::size_t i, const Matrix& shared) {
    return Matrix(gram[i].solve(kx[i].transpose() * shared));
  };

  std::vector<Matrix> mapped(s);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    double penalized = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      const Matrix r = ridge_map(i, w);
      mapped[i] = kx[i] * r;
      penalized += (mapped[i] - w).squaredNorm() + options.epsilon * r.squaredNorm();
    }
    report.iteration_objectives.push_back(pairwise_objective(mapped));
    report.penalized_objectives.push_back(penalized);
    w.setZero();
    for (const auto& m : mapped) w += m;
    w /= static_cast<double>(s);
  }
  bool completed = false;
  model.w = polar_orthonormalize_completed(w, completed, options.tol);
  if (completed) {
    report.advisories.push_back(
        "sha_r: the averaged shared space lost rank; missing directions were completed "
        "orthonormally");
  }

  model.g = Matrix::Zero(kernels.front().k.cols(), model.w.cols());
  for (std::size_t i = 0; i < s; ++i) model.g += kernels[i].k.transpose() * model.w;
  model.g /= static_cast<double>(s);

  // With the ridge mapping R, ‖K X R − W‖² + ε‖R‖² = tr(Wᵀ (I − P) W).
  double trace = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const Matrix r = ridge_map(i, model.w);
    mapped[i] = kx[i] * r;
    const double fit = (mapped[i] - model.w).squaredNorm();
    residual += fit;
    trace += fit + options.epsilon * r.squaredNorm();
  }
  report.trace_objective = trace;
  report.pairwise_objective = pairwise_objective(mapped);
  report.trace_form_gap = residual - trace;
  if (s == 1) {
    report.advisories.push_back("single training subject: the template is that subject's own data");
  }
  return model;
}

AlignmentModel fit_none(const Dataset& train) {
  require(train.num_subjects() >= 1, ErrorKind::kInvalidArgument, "fit: no training subjects");
  AlignmentModel model;
  model.method = Method::kNone;
  model.subjects = train.num_subjects();
  model.timepoints = train.num_timepoints();
  model.features = train.num_features();
  model.classes = train.num_classes();
  model.k = train.num_features();
  Digest digest;
  model.report.input_digest = digest.value();
  return model;
}

AlignmentModel fit_model(Method method, const Dataset& train, std::optional<double> gamma,
                         const FitOptions& options) {
  switch (method) {
    case Method::kNone: return fit_none(train);
    case Method::kRha: return fit_rha(train, options);
    case Method::kSha: {
      const auto kernels = build_kernels(train, gamma);
      return fit_sha(train, kernels, options);
    }
    case Method::kShaR: {
      const auto kernels = build_kernels(train, gamma);
      return fit_sha_r(train, kernels, options);
    }
  }
  fail(ErrorKind::kInvalidArgument, "unknown method");
}

MappedFeatures map_subject(const AlignmentModel& model, const SubjectData& subject,
                           std::optional<double> epsilon) {
  if (model.method == Method::kNone) return {subject.id, subject.x};
  require(subject.x.rows() == model.g.rows(), ErrorKind::kInvalidArgument,
          "map_subject: subject '" + subject.id + "' has " + std::to_string(subject.x.rows()) +
              " time points, template has " + std::to_string(model.g.rows()));
  const auto rank = static_cast<std::size_t>(std::min(subject.x.rows(), subject.x.cols()));
  const auto projector = regularized_projector(subject.x, epsilon.value_or(model.epsilon), rank);
  return {subject.id, projector.apply(model.g)};
}

std::vector<MappedFeatures> map_dataset(const AlignmentModel& model, const Dataset& d,
                                        std::optional<double> epsilon) {
  std::vector<MappedFeatures> out;
  out.reserve(d.num_subjects());
  for (const auto& s : d.subjects) out.push_back(map_subject(model, s, epsilon));
  return out;
}

namespace {

void check_same_shape(std::span<const Matrix> mapped) {
  require(!mapped.empty(), ErrorKind::kInvalidArgument, "objective: no matrices");
  for (const auto& m : mapped) {
    require(m.rows() == mapped.front().rows() && m.cols() == mapped.front().cols(),
            ErrorKind::kInvalidArgument, "objective: mapped matrices differ in shape");
  }
}

}  // namespace

double pairwise_objective(std::span<const Matrix> mapped) {
  check_same_shape(mapped);
  double total = 0.0;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    for (std::size_t j = i + 1; j < mapped.size(); ++j) {
      total += (mapped[i] - mapped[j]).squaredNorm();
    }
  }
  return total;
}

double pairwise_objective(const Dataset& d, std::span<const SupervisionKernel> kernels,
                     std::span<const Matrix> mappings) {
  require(kernels.size() == d.num_subjects() && mappings.size() == d.num_subjects(),
          ErrorKind::kInvalidArgument, "objective: need one kernel and mapping per subject");
  std::vector<Matrix> mapped;
  mapped.reserve(d.num_subjects());
  for (std::size_t i = 0; i < d.num_subjects(); ++i) {
    const Matrix kx = kernels[i].apply(d.subjects[i].x);
    require(mappings[i].rows() == kx.cols(), ErrorKind::kInvalidArgument,
            "objective: mapping of subject '" + d.subjects[i].id + "' has wrong row count");
    mapped.push_back(kx * mappings[i]);
  }
  return pairwise_objective(mapped);
}

double mean_deviation_objective(std::span<const Matrix> mapped) {
  check_same_shape(mapped);
  Matrix mean = Matrix::Zero(mapped.front().rows(), mapped.front().cols());
  for (const auto& m : mapped) mean += m;
  mean /= static_cast<double>(mapped.size());
  double total = 0.0;
  for (const auto& m : mapped) total += (m - mean).squaredNorm();
  return total;
}

}  // namespace supalign

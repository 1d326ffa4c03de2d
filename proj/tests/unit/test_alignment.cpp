#include <doctest.h>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "../test_util.hpp"
#include "supalign/alignment.hpp"
#include "supalign/metrics.hpp"
#include "supalign/synth.hpp"

using namespace supalign;
using testing::error_kind;
using testing::random_dataset;

namespace {

std::vector<Matrix> z_of(const AlignmentModel& model, const Dataset& d) {
  std::vector<Matrix> z;
  for (auto& m : map_dataset(model, d)) z.push_back(m.z);
  return z;
}

Dataset identical_subjects(std::size_t s, std::uint64_t seed) {
  Dataset d = random_dataset(1, 24, 10, 3, seed);
  for (std::size_t i = 1; i < s; ++i) {
    d.subjects.push_back({"copy" + std::to_string(i), d.subjects[0].x});
    d.labels.push_back(d.labels[0]);
  }
  return d;
}

}  // namespace

TEST_SUITE("alignment") {

TEST_CASE("method names round trip") {
  for (Method m : {Method::kSha, Method::kShaR, Method::kRha, Method::kNone}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(error_kind([] { parse_method("srm"); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("sha on identical subjects maps them identically") {
  const Dataset d = identical_subjects(4, 1);
  const auto kernels = build_kernels(d);
  const auto model = fit_sha(d, kernels);
  const auto z = z_of(model, d);
  for (std::size_t i = 1; i < z.size(); ++i) CHECK((z[i] - z[0]).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(rho1(z).mean == doctest::Approx(1.0));
  CHECK(model.report.pairwise_objective < 1e-16);
}

TEST_CASE("sha model invariants") {
  const Dataset d = random_dataset(4, 30, 12, 3, 2);
  const auto kernels = build_kernels(d);
  const auto model = fit_sha(d, kernels);
  CHECK(model.w.rows() == 3);
  CHECK(model.w.cols() == 3);
  CHECK((model.w.transpose() * model.w - Matrix::Identity(3, 3)).norm() < 1e-8);
  CHECK(model.g.rows() == 30);
  CHECK(model.g.allFinite());
  CHECK(model.report.eigenvalues.size() == 3);

  Matrix g = Matrix::Zero(30, 3);
  for (const auto& k : kernels) g += k.k.transpose() * model.w;
  CHECK((model.g - g / 4.0).cwiseAbs().maxCoeff() < 1e-12);

  FitOptions two;
  two.k = 2;
  CHECK(fit_sha(d, kernels, two).w.cols() == 2);
}

TEST_CASE("sha U and W match a dense assembly") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = random_dataset(3, 20, 8, 4, rng());
    const auto kernels = build_kernels(d);
    const auto model = fit_sha(d, kernels);
    Matrix u = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < 3; ++i) {
      const Matrix kx = kernels[i].k * d.subjects[i].x;
      u += Matrix::Identity(4, 4) - oracle::dense_projector_rows(kx, 1e-4);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(u);
    CHECK((model.report.eigenvalues - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(model.report.trace_objective - es.eigenvalues().sum()) < 1e-8);
  }
}

TEST_CASE("rha trace objective matches a dense eigen-solution") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = random_dataset(3, 15, 6, 3, rng());
    const auto model = fit_rha(d);
    Matrix u = Matrix::Zero(15, 15);
    for (const auto& s : d.subjects) u += Matrix::Identity(15, 15) - oracle::dense_projector(s.x, 1e-4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(u);
    CHECK(model.k == 6);
    CHECK(std::abs(model.report.trace_objective - es.eigenvalues().head(6).sum()) < 1e-8);
    CHECK((model.g - model.w).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("rha on identical subjects has zero objective") {
  const Dataset d = identical_subjects(3, 5);
  const auto model = fit_rha(d);
  const auto z = z_of(model, d);
  for (std::size_t i = 1; i < z.size(); ++i) CHECK((z[i] - z[0]).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(pairwise_objective(z) < 1e-16);
}

TEST_CASE("sha with one class per time point reduces to rha") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::Index t = 8;
    Dataset d = random_dataset(3, t, 5, 2, rng());
    for (auto& l : d.labels) l = LabelMatrix(Matrix::Identity(t, t));
    d.class_names.clear();
    for (Eigen::Index c = 0; c < t; ++c) d.class_names.push_back("t" + std::to_string(c));
    const auto kernels = build_kernels(d, 0.0);
    FitOptions opt;
    opt.k = 5;
    const auto sha = fit_sha(d, kernels, opt);
    const auto rha = fit_rha(d, opt);
    CHECK(oracle::sign_aligned_diff(sha.w, rha.w) < 1e-8);
    CHECK(oracle::sign_aligned_diff(sha.g, rha.g) < 1e-8);
    CHECK((sha.report.eigenvalues - rha.report.eigenvalues).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("sha space scores no worse than the rha template under the same K") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    const Dataset d = generate(cfg).dataset;
    const auto kernels = build_kernels(d);
    FitOptions opt;
    opt.k = d.num_classes();
    const auto sha = fit_sha(d, kernels, opt);
    const auto rha = fit_rha(d, opt);
    const auto l = static_cast<Eigen::Index>(d.num_classes());
    Matrix kg = Matrix::Zero(l, rha.g.cols());
    for (const auto& k : kernels) kg += k.k * rha.g;
    const Eigen::JacobiSVD<Matrix> svd(kg, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix w_rha = svd.matrixU() * svd.matrixV().transpose();
    double f_sha = 0.0, f_rha = 0.0;
    for (std::size_t i = 0; i < d.num_subjects(); ++i) {
      const Matrix residual = Matrix::Identity(l, l) -
                              oracle::dense_projector_rows(kernels[i].k * d.subjects[i].x, opt.epsilon);
      f_sha += (sha.w.transpose() * residual * sha.w).trace();
      f_rha += (w_rha.transpose() * residual * w_rha).trace();
    }
    CAPTURE(seed);
    CHECK(f_sha <= f_rha + 1e-10);
    CHECK(f_sha == doctest::Approx(sha.report.trace_objective).epsilon(1e-8));
  }
}

TEST_CASE("sha_r objective is non-increasing") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t l = 2 + rng() % 4;
    const Dataset d = random_dataset(2 + rng() % 5, static_cast<Eigen::Index>(4 * l),
                                     static_cast<Eigen::Index>(3 + rng() % 10), l, rng(),
                                     trial % 2 == 0);
    const auto kernels = build_kernels(d);
    FitOptions opt;
    opt.epsilon = trial % 3 == 0 ? 1e-4 : 0.5;
    const auto model = fit_sha_r(d, kernels, opt);
    const auto& obj = model.report.iteration_objectives;
    REQUIRE(obj.size() == 10);
    for (std::size_t i = 1; i < obj.size(); ++i) CHECK(obj[i] <= obj[i - 1] + 1e-10);
    CHECK((model.w.transpose() * model.w - Matrix::Identity(model.w.cols(), model.w.cols())).norm() < 1e-8);
  }
}

TEST_CASE("sha_r from the sha solution starts at the sha objective") {
  const Dataset d = random_dataset(4, 24, 10, 3, 8);
  const auto kernels = build_kernels(d);
  const auto sha = fit_sha(d, kernels);
  FitOptions opt;
  opt.iterations = 1;
  opt.init = ShaRInit::kSha;
  const auto shar = fit_sha_r(d, kernels, opt);
  const double a = shar.report.iteration_objectives.front();
  const double b = sha.report.pairwise_objective;
  CHECK(std::abs(a - b) <= 0.05 * b);
}

TEST_CASE("sha_r on identical subjects reaches zero in one iteration") {
  const Dataset d = identical_subjects(3, 9);
  const auto kernels = build_kernels(d);
  FitOptions opt;
  opt.iterations = 1;
  const auto model = fit_sha_r(d, kernels, opt);
  CHECK(model.report.iteration_objectives.front() < 1e-16);
}

TEST_CASE("map_subject") {
  const Dataset d = random_dataset(3, 12, 20, 3, 10);
  const auto kernels = build_kernels(d);
  const auto model = fit_sha(d, kernels);

  SUBCASE("matches the dense formula") {
    for (const auto& s : d.subjects) {
      const Matrix ref = oracle::dense_projector_rows(s.x, 1e-4) * model.g;
      CHECK((map_subject(model, s).z - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("orthonormal rows reproduce the template") {
    std::mt19937_64 rng(11);
    Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(20, 12, rng));
    const Matrix rows = (qr.householderQ() * Matrix::Identity(20, 12)).transpose();
    const auto z = map_subject(model, {"q", rows}, 0.0).z;
    CHECK((z - model.g).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("any full-row-rank subject with T at most V lands on the template") {
    std::mt19937_64 rng(13);
    const Matrix x = oracle::random_matrix(12, 20, rng);
    const auto z = map_subject(model, {"wide", x}).z;
    CHECK((z - model.g).cwiseAbs().maxCoeff() < 1e-3 * model.g.cwiseAbs().maxCoeff());
  }
  SUBCASE("none is the identity") {
    const auto none = fit_none(d);
    CHECK(map_subject(none, d.subjects[1]).z == d.subjects[1].x);
  }
  SUBCASE("time point mismatch") {
    CHECK(error_kind([&] { map_subject(model, {"x", Matrix::Ones(5, 20)}); }) ==
          ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("pairwise_objective and the mean-deviation identity") {
  Matrix a = Matrix::Zero(2, 3);
  std::vector<Matrix> same{a, a, a};
  CHECK(pairwise_objective(same) == 0.0);
  Matrix b = a;
  b(1, 2) = 0.3;
  std::vector<Matrix> pair{a, b};
  CHECK(pairwise_objective(pair) == doctest::Approx(0.09));

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t s = 2 + rng() % 5;
    std::vector<Matrix> m;
    for (std::size_t i = 0; i < s; ++i) m.push_back(oracle::random_matrix(3, 4, rng));
    const double pairwise = pairwise_objective(m);
    CHECK(std::abs(pairwise - oracle::pairwise_objective(m)) < 1e-10);
    CHECK(std::abs(pairwise - static_cast<double>(s) * mean_deviation_objective(m)) < 1e-8);
  }
  std::vector<Matrix> ragged{Matrix::Ones(2, 2), Matrix::Ones(3, 2)};
  CHECK(error_kind([&] { pairwise_objective(ragged); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("trace form is exact at eps 0 and bounded above otherwise") {
  // Raw Gaussian data keeps K·X at full rank, which eps = 0 needs.
  const Dataset d = random_dataset(4, 20, 9, 3, 13, false);
  const auto kernels = build_kernels(d);
  FitOptions exact;
  exact.epsilon = 0.0;
  CHECK(std::abs(fit_sha(d, kernels, exact).report.trace_form_gap) < 1e-8);
  FitOptions ridge;
  ridge.epsilon = 0.5;
  CHECK(fit_sha(d, kernels, ridge).report.trace_form_gap <= 1e-12);
}

TEST_CASE("subject order, streaming and threads do not change the fit") {
  const Dataset d = random_dataset(5, 20, 8, 4, 14);
  const auto kernels = build_kernels(d);
  const auto base = fit_sha(d, kernels);

  FitOptions streaming;
  streaming.streaming = true;
  const auto st = fit_sha(d, kernels, streaming);
  CHECK((st.w - base.w).cwiseAbs().maxCoeff() < 1e-9);

  FitOptions parallel;
  parallel.parallel = true;
  const auto par = fit_sha(d, kernels, parallel);
  CHECK(par.w == base.w);
  CHECK(par.g == base.g);

  Dataset perm = d;
  std::reverse(perm.subjects.begin(), perm.subjects.end());
  const auto pk = build_kernels(perm);
  const auto p = fit_sha(perm, pk);
  CHECK(oracle::sign_aligned_diff(p.w, base.w) < 1e-9);
  const auto za = z_of(base, d), zb = z_of(p, d);
  for (std::size_t i = 0; i < za.size(); ++i) CHECK(oracle::sign_aligned_diff(za[i], zb[i]) < 1e-9);
}

TEST_CASE("scaling a subject before normalization is a no-op") {
  Dataset d = random_dataset(3, 16, 7, 2, 15, false);
  Dataset scaled = d;
  scaled.subjects[1].x *= 7.5;
  const auto a = normalize(d).dataset, b = normalize(scaled).dataset;
  const auto ma = fit_model(Method::kSha, a, {}), mb = fit_model(Method::kSha, b, {});
  CHECK((ma.w - mb.w).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((ma.g - mb.g).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit argument errors") {
  const Dataset d = random_dataset(3, 12, 5, 3, 16);
  const auto kernels = build_kernels(d);
  FitOptions big;
  big.k = 4;
  CHECK(error_kind([&] { fit_sha(d, kernels, big); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([&] { fit_sha_r(d, kernels, big); }) == ErrorKind::kInvalidArgument);
  big.k = 6;
  CHECK(error_kind([&] { fit_rha(d, big); }) == ErrorKind::kInvalidArgument);
  std::vector<SupervisionKernel> short_kernels(kernels.begin(), kernels.begin() + 2);
  CHECK(error_kind([&] { fit_sha(d, short_kernels); }) == ErrorKind::kInvalidArgument);
  std::vector<SupervisionKernel> wrong_t(3, identity_kernel(5));
  CHECK(error_kind([&] { fit_sha(d, wrong_t); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("model save and load") {
  testing::TempDir dir;
  const Dataset d = random_dataset(3, 12, 5, 3, 17);
  for (Method m : {Method::kSha, Method::kShaR, Method::kRha, Method::kNone}) {
    const auto model = fit_model(m, d, {});
    const auto sub = dir / std::string(to_string(m));
    save_model(model, sub);
    const auto back = load_model(sub);
    CHECK(back.method == m);
    CHECK(back.w == model.w);
    CHECK(back.g == model.g);
    CHECK(back.k == model.k);
    CHECK(back.epsilon == model.epsilon);
    CHECK(back.report.input_digest == model.report.input_digest);
  }
}

}  // TEST_SUITE

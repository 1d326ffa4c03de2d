#include "supalign/classify.hpp"

#include <chrono>
#include <cmath>
#include <future>

#include "supalign/errors.hpp"
#include "supalign/metrics.hpp"

namespace supalign {

Matrix LinearClassifier::scores(const Matrix& features) const {
  require(features.cols() == weights.rows(), ErrorKind::kInvalidArgument,
          "classifier: expected " + std::to_string(weights.rows()) + " features, got " +
              std::to_string(features.cols()));
  return (features * weights).rowwise() + bias.transpose();
}

std::vector<int> LinearClassifier::predict(const Matrix& features) const {
  return argmax_rows(scores(features));
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c) {
      if (scores(r, c) > scores(r, best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  return out;
}

LinearClassifier train(const Matrix& features, std::span<const int> labels,
                       std::size_t num_classes, double ridge) {
  require(static_cast<std::size_t>(features.rows()) == labels.size(), ErrorKind::kInvalidArgument,
          "train: one label per row required");
  require(std::isfinite(ridge) && ridge > 0.0, ErrorKind::kInvalidArgument,
          "train: ridge must be positive");
  require(all_finite(features), ErrorKind::kInvalidData, "train: non-finite features");
  std::vector<bool> present(num_classes, false);
  std::size_t distinct = 0;
  for (int c : labels) {
    require(c >= 0 && static_cast<std::size_t>(c) < num_classes, ErrorKind::kInvalidArgument,
            "train: label " + std::to_string(c) + " outside [0, " + std::to_string(num_classes) +
                ")");
    if (!present[static_cast<std::size_t>(c)]) {
      present[static_cast<std::size_t>(c)] = true;
      ++distinct;
    }
  }
  require(distinct >= 2, ErrorKind::kInvalidArgument, "train: need at least 2 classes");

  const Eigen::Index n = features.rows();
  const auto l = static_cast<Eigen::Index>(num_classes);
  Matrix targets = Matrix::Constant(n, l, -1.0);
  for (Eigen::Index r = 0; r < n; ++r) targets(r, labels[static_cast<std::size_t>(r)]) = 1.0;

  const Vector x_mean = features.colwise().mean();
  const Vector y_mean = targets.colwise().mean();
  const Matrix xc = features.rowwise() - x_mean.transpose();
  const Matrix yc = targets.rowwise() - y_mean.transpose();
  Matrix gram = xc.transpose() * xc;
  gram.diagonal().array() += ridge;

  LinearClassifier model;
  model.ridge = ridge;
  model.weights = gram.ldlt().solve(xc.transpose() * yc);
  model.bias = y_mean - model.weights.transpose() * x_mean;
  return model;
}

void RidgeClassifier::fit(const Matrix& features, std::span<const int> labels,
                          std::size_t num_classes) {
  model_ = train(features, labels, num_classes, ridge_);
}

Matrix RidgeClassifier::decision_function(const Matrix& features) const {
  return model_.scores(features);
}

ClassifierFactory ridge_factory(double ridge) {
  return [ridge] { return std::make_unique<RidgeClassifier>(ridge); };
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

// Stacks the labeled rows of the given mapped subjects.
void stack_labeled(std::span<const Matrix> mapped, std::span<const LabelMatrix* const> labels,
                   Matrix& rows, std::vector<int>& classes) {
  std::size_t total = 0;
  for (const auto* l : labels) total += l->labeled_count();
  const Eigen::Index cols = mapped.empty() ? 0 : mapped.front().cols();
  rows.resize(static_cast<Eigen::Index>(total), cols);
  classes.clear();
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    const auto& c = labels[i]->classes();
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (c[t] < 0) continue;
      rows.row(r++) = mapped[i].row(static_cast<Eigen::Index>(t));
      classes.push_back(c[t]);
    }
  }
}

FoldResult run_fold(const Dataset& d, std::size_t held_out, Method method, const Hyperparams& hp,
                    const ClassifierFactory& factory) {
  FoldResult fold;
  fold.held_out = held_out;
  fold.subject_id = d.subjects[held_out].id;
  const LosoSplit split = split_loso(d, held_out);
  if (split.degenerate) {
    fold.advisories.push_back("single training subject: template is that subject's own data");
  }

  auto start = Clock::now();
  const AlignmentModel model = fit_model(method, split.train, hp.gamma, hp.fit);
  fold.timings.fit_ns = elapsed_ns(start);
  fold.fit_digest = model.report.input_digest;
  fold.advisories.insert(fold.advisories.end(), model.report.advisories.begin(),
                         model.report.advisories.end());

  start = Clock::now();
  std::vector<Matrix> train_z;
  std::vector<const LabelMatrix*> train_labels;
  for (std::size_t i = 0; i < split.train.num_subjects(); ++i) {
    train_z.push_back(map_subject(model, split.train.subjects[i]).z);
    train_labels.push_back(&split.train.labels[i]);
  }
  const Matrix test_z = map_subject(model, split.test.subjects.front()).z;
  fold.timings.map_ns = elapsed_ns(start);

  start = Clock::now();
  Matrix train_rows;
  std::vector<int> train_classes;
  stack_labeled(train_z, train_labels, train_rows, train_classes);
  auto classifier = factory ? factory() : ridge_factory(hp.ridge)();
  classifier->fit(train_rows, train_classes, d.num_classes());
  fold.timings.train_ns = elapsed_ns(start);

  start = Clock::now();
  Matrix test_rows;
  std::vector<int> truth;
  const LabelMatrix* test_labels[] = {&split.test.labels.front()};
  stack_labeled(std::span<const Matrix>(&test_z, 1), test_labels, test_rows, truth);
  require(test_rows.rows() > 0, ErrorKind::kInvalidData,
          "loso: held-out subject '" + fold.subject_id + "' has no labeled time points");
  const Matrix scores = classifier->decision_function(test_rows);
  const auto predicted = argmax_rows(scores);
  const auto scored = classification_scores(predicted, truth, d.num_classes(), &scores);
  fold.timings.score_ns = elapsed_ns(start);

  fold.accuracy = scored.accuracy;
  fold.auc = scored.auc;
  fold.advisories.insert(fold.advisories.end(), scored.advisories.begin(),
                         scored.advisories.end());
  fold.train_rows = static_cast<std::size_t>(train_rows.rows());
  fold.test_rows = static_cast<std::size_t>(test_rows.rows());
  return fold;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

LosoReport run_loso(const Dataset& d, Method method, const Hyperparams& hp,
                    const ClassifierFactory& factory, bool parallel_folds) {
  require(d.num_subjects() >= 2, ErrorKind::kInvalidArgument, "loso: need at least 2 subjects");
  LosoReport report;
  report.method = method;
  const std::size_t s = d.num_subjects();
  if (parallel_folds) {
    std::vector<std::future<FoldResult>> jobs;
    for (std::size_t i = 0; i < s; ++i) {
      jobs.push_back(std::async(std::launch::async, run_fold, std::cref(d), i, method,
                                std::cref(hp), std::cref(factory)));
    }
    for (auto& j : jobs) report.folds.push_back(j.get());
  } else {
    for (std::size_t i = 0; i < s; ++i) report.folds.push_back(run_fold(d, i, method, hp, factory));
  }

  std::vector<double> acc, auc;
  for (const auto& f : report.folds) {
    acc.push_back(f.accuracy);
    if (f.auc) auc.push_back(*f.auc);
  }
  std::tie(report.accuracy_mean, report.accuracy_std) = mean_std(acc);
  if (!auc.empty()) {
    const auto [m, sd] = mean_std(auc);
    report.auc_mean = m;
    report.auc_std = sd;
  }
  return report;
}

}  // namespace supalign

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supalign/alignment.hpp"
#include "supalign/dataset.hpp"
#include "supalign/linalg.hpp"

namespace supalign {

/// One-vs-rest ridge regression on ±1 targets with an unpenalized intercept.
struct LinearClassifier {
  Matrix weights;  // k × L
  Vector bias;     // L
  double ridge = 1.0;

  Matrix scores(const Matrix& features) const;
  /// Argmax of the scores; ties go to the lowest class index.
  std::vector<int> predict(const Matrix& features) const;
};

/// `labels` holds a class in [0, num_classes) per row of `features`.
LinearClassifier train(const Matrix& features, std::span<const int> labels,
                       std::size_t num_classes, double ridge = 1.0);

std::vector<int> argmax_rows(const Matrix& scores);

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual void fit(const Matrix& features, std::span<const int> labels,
                   std::size_t num_classes) = 0;
  /// n × L decision values.
  virtual Matrix decision_function(const Matrix& features) const = 0;
  std::vector<int> predict(const Matrix& features) const {
    return argmax_rows(decision_function(features));
  }
};

class RidgeClassifier final : public Classifier {
 public:
  explicit RidgeClassifier(double ridge = 1.0) : ridge_(ridge) {}
  void fit(const Matrix& features, std::span<const int> labels, std::size_t num_classes) override;
  Matrix decision_function(const Matrix& features) const override;
  const LinearClassifier& model() const { return model_; }

 private:
  double ridge_;
  LinearClassifier model_;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;
ClassifierFactory ridge_factory(double ridge = 1.0);

struct Hyperparams {
  FitOptions fit;
  std::optional<double> gamma;  // unset: 1/(2T)
  double ridge = 1.0;
};

struct StageTimings {
  std::int64_t fit_ns = 0;
  std::int64_t map_ns = 0;
  std::int64_t train_ns = 0;
  std::int64_t score_ns = 0;
};

struct FoldResult {
  std::size_t held_out = 0;
  std::string subject_id;
  double accuracy = 0.0;
  std::optional<double> auc;
  /// Digest of everything the alignment fit consumed.
  std::uint64_t fit_digest = 0;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  StageTimings timings;
  std::vector<std::string> advisories;
};

struct LosoReport {
  Method method = Method::kNone;
  std::vector<FoldResult> folds;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  std::optional<double> auc_mean;
  std::optional<double> auc_std;
};

/// Leave-one-subject-out evaluation. Each fold fits the alignment on the
/// training subjects alone, maps every subject through the fitted template,
/// trains a classifier on the labeled training rows and scores the held-out
/// subject's labeled rows. Input is used as given; normalize beforehand.
LosoReport run_loso(const Dataset& d, Method method, const Hyperparams& hp = {},
                    const ClassifierFactory& factory = {}, bool parallel_folds = false);

}  // namespace supalign

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "supalign/dataset.hpp"
#include "supalign/linalg.hpp"

namespace supalign {

/// Pearson correlation of the flattened entries of two equally shaped
/// matrices. Throws undefined-correlation if either side has zero variance.
double pearson(const Matrix& a, const Matrix& b);

/// A stimulus instance is a maximal run of consecutive time points carrying
/// the same class. `ordinal` counts the runs of that class in temporal order.
struct StimulusInstance {
  int class_index = -1;
  std::size_t ordinal = 0;
  Eigen::Index begin = 0;
  Eigen::Index length = 0;
};

class InstanceLayout {
 public:
  static InstanceLayout from_labels(const LabelMatrix& labels);

  std::size_t num_classes() const { return by_class_.size(); }
  /// Instances of class m in temporal order.
  const std::vector<StimulusInstance>& instances(std::size_t m) const { return by_class_[m]; }
  /// L_m per class.
  std::vector<std::size_t> counts() const;
  std::size_t num_timepoints() const { return timepoints_; }
  const std::vector<Eigen::Index>& labeled_rows() const { return labeled_rows_; }

 private:
  std::vector<std::vector<StimulusInstance>> by_class_;
  std::vector<Eigen::Index> labeled_rows_;
  std::size_t timepoints_ = 0;
};

struct CorrelationStat {
  bool defined = false;
  double mean = 0.0;
  double std = 0.0;        // population std of the per-subject-pair means
  std::size_t pairs = 0;   // number of correlations averaged (the Ψ normalizer)
};

struct CorrelationReport {
  CorrelationStat rho1, rho2, rho3, rho4;
  std::vector<std::string> advisories;
};

/// Closed-form comparison counts for S subjects and instance counts L_m.
std::size_t psi1(std::size_t s);
std::size_t psi2(std::size_t s, std::span<const std::size_t> counts);
std::size_t psi3(std::size_t s, std::span<const std::size_t> counts);
std::size_t psi4(std::size_t s, std::span<const std::size_t> counts);

/// Mean correlation of whole mapped matrices over unordered subject pairs.
/// When `rows` is given only those rows enter the correlation.
CorrelationStat rho1(std::span<const Matrix> mapped,
                     const std::vector<Eigen::Index>* rows = nullptr);

/// Same class, same instance position across subjects.
CorrelationStat rho2(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories = nullptr);
/// Same class, different instance positions.
CorrelationStat rho3(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories = nullptr);
/// Different classes, every instance pairing.
CorrelationStat rho4(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories = nullptr);

/// All four metrics. Rest time points are left out of ρ1 unless
/// `include_rest_in_rho1` is set.
CorrelationReport correlation_report(std::span<const Matrix> mapped, const LabelMatrix& labels,
                                     bool include_rest_in_rho1 = false);

struct ClassificationScores {
  double accuracy = 0.0;
  std::optional<double> auc;
  std::vector<std::string> advisories;
};

/// Accuracy plus AUC. With `scores` (n × L decision values) AUC ranks by the
/// scores; otherwise by the indicator of the predicted class. Binary problems
/// use the class-1 column; multi-class problems average one-vs-rest AUC over
/// the classes present in `truth`.
ClassificationScores classification_scores(std::span<const int> predicted,
                                           std::span<const int> truth, std::size_t num_classes,
                                           const Matrix* scores = nullptr);

/// Area under the ROC curve of `score` for the positives in `positive`, with
/// ties counted as one half.
double roc_auc(std::span<const double> score, std::span<const bool> positive);

}  // namespace supalign

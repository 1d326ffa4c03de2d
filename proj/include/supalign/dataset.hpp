#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "supalign/linalg.hpp"

namespace supalign {

/// One subject's time series: rows are time points, columns voxels/features.
struct SubjectData {
  std::string id;
  Matrix x;
};

/// L×T class indicator. A column is either one-hot (a labeled time point) or
/// all zero (a rest / unlabeled time point).
class LabelMatrix {
 public:
  explicit LabelMatrix(Matrix y);

  /// Builds the indicator from a class index per time point; -1 marks rest.
  static LabelMatrix from_classes(std::span<const int> classes, std::size_t num_classes);

  const Matrix& y() const { return y_; }
  std::size_t num_classes() const { return static_cast<std::size_t>(y_.rows()); }
  std::size_t num_timepoints() const { return static_cast<std::size_t>(y_.cols()); }

  /// Class index per time point, -1 for rest.
  const std::vector<int>& classes() const { return classes_; }
  std::vector<Eigen::Index> labeled_indices() const;
  std::size_t labeled_count() const;
  bool has_rest() const { return labeled_count() != num_timepoints(); }

  bool operator==(const LabelMatrix& other) const { return y_ == other.y_; }

 private:
  Matrix y_;
  std::vector<int> classes_;
};

struct Dataset {
  std::vector<std::string> class_names;
  std::vector<SubjectData> subjects;
  std::vector<LabelMatrix> labels;  // one per subject

  std::size_t num_subjects() const { return subjects.size(); }
  std::size_t num_timepoints() const;
  std::size_t num_features() const;
  std::size_t num_classes() const { return class_names.size(); }
};

/// Checks every Dataset invariant: S ≥ 1, T ≥ 2, V ≥ 1, L ≥ 2, shared T and V
/// across subjects, label shapes L×T, unique filename-safe subject ids. In
/// strict mode all subjects must also carry identical label matrices.
void validate_dataset(const Dataset& d, bool strict = true);

struct LoadOptions {
  bool strict = true;
};

/// Reads a JSON manifest {class_names, subjects: [{id, data, labels}]} whose
/// paths are relative to the manifest's directory. The result is validated
/// but not normalized.
Dataset load_dataset(const std::filesystem::path& manifest_path, LoadOptions options = {});

/// Writes manifest.json plus <id>_data.csv / <id>_labels.csv into `dir`.
void save_dataset(const Dataset& d, const std::filesystem::path& dir);

/// Z-scores each column with the sample standard deviation (divide by T−1).
/// Constant columns become zero and their indices are appended to
/// `constant_columns` when given.
Matrix standardize_columns(const Matrix& x, std::vector<Eigen::Index>* constant_columns = nullptr);

struct NormalizeResult {
  Dataset dataset;
  std::vector<std::string> advisories;
};

NormalizeResult normalize(const Dataset& d);

struct LosoSplit {
  Dataset train;
  Dataset test;
  /// Set when the training side has a single subject, so any template fit on
  /// it is just that subject's own data.
  bool degenerate = false;
};

LosoSplit split_loso(const Dataset& d, std::size_t held_out);

/// Keeps the first `count` time points of every subject and label matrix.
Dataset truncate_timepoints(const Dataset& d, std::size_t count);

}  // namespace supalign

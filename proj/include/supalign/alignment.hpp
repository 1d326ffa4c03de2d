#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "supalign/dataset.hpp"
#include "supalign/linalg.hpp"
#include "supalign/supervision.hpp"

namespace supalign {

enum class Method { kSha, kShaR, kRha, kNone };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

enum class ShaRInit {
  kKernelSvd,  // top-k left singular vectors of Σ K·X
  kSha,        // the single-shot solution
};

struct FitOptions {
  double epsilon = 1e-4;
  /// Shared-space dimension. Unset means L for sha/sha_r and min(V, T) for rha.
  std::optional<std::size_t> k;
  std::size_t iterations = 10;  // sha_r only
  ShaRInit init = ShaRInit::kKernelSvd;
  /// Accumulate U one subject at a time instead of materializing every
  /// per-subject residual projection first.
  bool streaming = false;
  /// Compute per-subject projectors on worker threads. The reduction order is
  /// fixed, so results are identical to the sequential path.
  bool parallel = false;
  Tolerance tol{};
};

struct FitReport {
  /// tr(Wᵀ U W), U = Σ (I − P) over the subjects' regularized projectors.
  double trace_objective = 0.0;
  /// Σ_{i<j} ‖K_i X_i R_i − K_j X_j R_j‖²_F with each R_i the ridge solution
  /// (K X)ᵀ-side closed form for the fitted W.
  double pairwise_objective = 0.0;
  /// Σ ‖K X R − W‖²_F − tr(WᵀUW). Zero at ε = 0; non-positive otherwise.
  double trace_form_gap = 0.0;
  /// All eigenvalues of U, ascending (sha / rha).
  Vector eigenvalues;
  /// sha_r: pairwise objective per iteration.
  std::vector<double> iteration_objectives;
  /// sha_r: ridge-penalized residual Σ ‖K X R − W‖² + ε‖R‖² per iteration.
  std::vector<double> penalized_objectives;
  std::vector<std::string> advisories;
  /// FNV-1a digest of every matrix the fit consumed (data and kernels).
  std::uint64_t input_digest = 0;
};

/// Fitted shared spaces. `w` is the category-level space (L×k for sha/sha_r,
/// T×k for rha); `g` is the time-point template (T×k) used to map subjects.
/// Both are empty for Method::kNone, whose mapping is the identity.
struct AlignmentModel {
  Method method = Method::kNone;
  Matrix w;
  Matrix g;
  double epsilon = 0.0;
  double gamma = 0.0;
  std::size_t k = 0;
  std::size_t subjects = 0;
  std::size_t timepoints = 0;
  std::size_t features = 0;
  std::size_t classes = 0;
  FitReport report;
};

struct MappedFeatures {
  std::string subject_id;
  Matrix z;  // T × k
};

AlignmentModel fit_sha(const Dataset& train, std::span<const SupervisionKernel> kernels,
                       const FitOptions& options = {});

/// Iterative counterpart of fit_sha: alternates per-subject ridge mappings of
/// K·X onto the current shared space with W ← mean of the mapped K·X·R. W is
/// orthonormalized once after the last iteration.
AlignmentModel fit_sha_r(const Dataset& train, std::span<const SupervisionKernel> kernels,
                         const FitOptions& options = {});

/// Unsupervised regularized alignment: the fit_sha pipeline with K = I_T.
AlignmentModel fit_rha(const Dataset& train, const FitOptions& options = {});

AlignmentModel fit_none(const Dataset& train);

/// Builds kernels from `train`'s labels (γ default 1/(2T)) and dispatches.
AlignmentModel fit_model(Method method, const Dataset& train, std::optional<double> gamma,
                         const FitOptions& options = {});

/// Z = P_X · G with P_X the regularized projector of the subject's data at
/// rank min(T, V). The V×V mapping is never formed. ε defaults to the model's.
MappedFeatures map_subject(const AlignmentModel& model, const SubjectData& subject,
                           std::optional<double> epsilon = {});

std::vector<MappedFeatures> map_dataset(const AlignmentModel& model, const Dataset& d,
                                        std::optional<double> epsilon = {});

/// Σ_{i<j} ‖M_i − M_j‖²_F.
double pairwise_objective(std::span<const Matrix> mapped);
/// Same, with M_i = K_i X_i R_i.
double pairwise_objective(const Dataset& d, std::span<const SupervisionKernel> kernels,
                     std::span<const Matrix> mappings);
/// Σ_i ‖M_i − mean(M)‖²_F.
double mean_deviation_objective(std::span<const Matrix> mapped);

/// Running U = Σ (I − P) over subjects. Holds a single dim×dim matrix.
class ResidualProjectionSum {
 public:
  explicit ResidualProjectionSum(Eigen::Index dim);

  /// Adds I − P for the regularized projector of `kx` at the given rank.
  /// Returns whether the projector was rank deficient.
  bool add(const Matrix& kx, double epsilon, std::size_t rank,
           const Tolerance& tol = kDefaultTolerance);
  void add_complement(const Matrix& complement);

  const Matrix& value() const { return sum_; }
  std::size_t count() const { return count_; }

 private:
  Matrix sum_;
  std::size_t count_ = 0;
};

/// Writes model.json, w.csv and g.csv (the latter two omitted for kNone).
void save_model(const AlignmentModel& model, const std::filesystem::path& dir);
AlignmentModel load_model(const std::filesystem::path& dir);

}  // namespace supalign

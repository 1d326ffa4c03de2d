#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "supalign/dataset.hpp"
#include "supalign/linalg.hpp"

namespace supalign {

/// H = I_t − γ·1_t (1_t the all-ones matrix) for any finite γ. Kernels accept
/// only 0 ≤ γ < 1/t: at γ ≥ 1/t the between-class term dominates and K flips
/// sign.
Matrix build_h(std::size_t t, double gamma);

/// det(H) in closed form: H has eigenvalue 1 − γt once and 1 with
/// multiplicity t − 1. Accepts any γ so diagnostics can sweep past 1/t.
double det_h(std::size_t t, double gamma);

/// 1/(2t), the balanced within/between trade-off.
double default_gamma(std::size_t labeled_timepoints);

/// K = Y·H restricted to labeled time points.
///
/// `k` keeps one column per time point of the full series; rest columns are
/// zero and H is built over the `t` labeled points only, so K·X only sees
/// labeled rows of X while downstream templates stay aligned with the full
/// time axis.
struct SupervisionKernel {
  Matrix k;          // L × T_full
  double gamma = 0;  // in [0, 1/t)
  std::size_t t = 0;  // labeled time points

  /// K·X (L × V). Throws when x does not have one row per time point.
  Matrix apply(const Matrix& x) const;
};

/// Builds K for `labels`. γ defaults to 1/(2t) when not given.
SupervisionKernel build_kernel(const LabelMatrix& labels, std::optional<double> gamma = {});

/// Identity supervision (K = I_T): reduces the supervised objective to
/// unsupervised regularized alignment.
SupervisionKernel identity_kernel(std::size_t t);

/// One kernel per subject of `d`.
std::vector<SupervisionKernel> build_kernels(const Dataset& d, std::optional<double> gamma = {});

}  // namespace supalign

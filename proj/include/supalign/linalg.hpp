#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace supalign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numeric tolerances shared by every check in the library. A single value is
/// threaded through the kernels so tightening or loosening is a one-line change.
struct Tolerance {
  double equivalence = 1e-8;  // algebraic identities, reconstruction checks
  double symmetry = 1e-10;    // symmetry of inputs to the eigen-solver
  double singular = 1e-12;    // singular values at or below this are zero
};

inline constexpr Tolerance kDefaultTolerance{};

bool all_finite(const Matrix& m);

/// Rank-r thin SVD: m ≈ left · diag(singular_values) · rightᵀ.
///
/// Each left singular vector has its largest-magnitude entry made positive (the
/// matching right vector is flipped with it), so repeated calls on the same
/// input return bit-identical factors. When the numerical rank of `m` is below
/// `rank`, the missing singular values are reported as zero, the factors are
/// completed with orthonormal vectors and `rank_deficient` is set.
struct TruncatedSvd {
  Matrix left;
  Vector singular_values;
  Matrix right;
  std::size_t rank = 0;
  bool rank_deficient = false;

  Matrix reconstruct() const;
};

TruncatedSvd truncated_svd(const Matrix& m, std::size_t rank,
                           const Tolerance& tol = kDefaultTolerance);

/// Regularized projection onto the column space of x:
///
///   P = x (xᵀx + εI)⁻¹ xᵀ = (A·D)(A·D)ᵀ,  D = diag(σᵢ / sqrt(σᵢ² + ε))
///
/// where A, σ come from the rank-truncated SVD of x. Only the n×r factor is
/// stored; `apply` never forms the n×n matrix.
class RegularizedProjector {
 public:
  RegularizedProjector(Matrix factor, Vector singular_values, double epsilon,
                       bool rank_deficient);

  const Matrix& factor() const { return factor_; }
  const Vector& singular_values() const { return singular_values_; }
  double epsilon() const { return epsilon_; }
  bool rank_deficient() const { return rank_deficient_; }
  Eigen::Index dim() const { return factor_.rows(); }

  /// P · m, evaluated as factor · (factorᵀ · m).
  Matrix apply(const Matrix& m) const;
  /// Materialized n×n projector. Intended for small n (tests, diagnostics).
  Matrix dense() const;
  /// I − P, materialized.
  Matrix complement() const;

 private:
  Matrix factor_;
  Vector singular_values_;
  double epsilon_;
  bool rank_deficient_;
};

RegularizedProjector regularized_projector(const Matrix& x, double epsilon,
                                           std::size_t rank,
                                           const Tolerance& tol = kDefaultTolerance);

struct SymmetricEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // columns, orthonormal
};

/// Dense symmetric eigendecomposition with the same sign convention as
/// truncated_svd (largest-magnitude entry of each eigenvector positive).
SymmetricEig symmetric_eig(const Matrix& m, const Tolerance& tol = kDefaultTolerance);

/// Flips the sign of each column so its largest-magnitude entry is positive.
/// Ties go to the lowest row index. Returns the applied signs (+1/-1).
Vector canonicalize_signs(Matrix& columns);

/// Orthonormal basis of the column space of `m` via its polar factor
/// (U·Vᵀ from the thin SVD). Throws singular-matrix on rank deficiency.
Matrix polar_orthonormalize(const Matrix& m, const Tolerance& tol = kDefaultTolerance);
/// Same, but directions missing from a rank-deficient `m` are filled with an
/// orthonormal completion instead of throwing; `completed` reports whether
/// that happened.
Matrix polar_orthonormalize_completed(const Matrix& m, bool& completed,
                                      const Tolerance& tol = kDefaultTolerance);

}  // namespace supalign

#include "supalign/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "supalign/errors.hpp"

namespace supalign {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidData: return "invalid-data";
    case ErrorKind::kSingularMatrix: return "singular-matrix";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUndefinedCorrelation: return "undefined-correlation";
  }
  return "unknown";
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector canonicalize_signs(Matrix& columns) {
  Vector signs = Vector::Ones(columns.cols());
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < columns.rows(); ++i) {
      const double a = std::abs(columns(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) {
      columns.col(j) *= -1.0;
      signs(j) = -1.0;
    }
  }
  return signs;
}

namespace {

// Replaces columns [good, r) of `basis` with an orthonormal completion of the
// span of its first `good` columns.
void complete_basis(Matrix& basis, Eigen::Index good) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index r = basis.cols();
  if (good >= r) return;
  Matrix full;
  if (good == 0) {
    full = Matrix::Identity(n, n);
  } else {
    Eigen::HouseholderQR<Matrix> qr(basis.leftCols(good));
    full = qr.householderQ() * Matrix::Identity(n, n);
    // Householder Q reproduces the kept columns up to sign; keep the originals.
    full.leftCols(good) = basis.leftCols(good);
  }
  basis.rightCols(r - good) = full.middleCols(good, r - good);
}

TruncatedSvd svd_impl(const Matrix& m, std::size_t rank, const Tolerance& tol,
                      bool want_right) {
  require(m.rows() >= 1 && m.cols() >= 1, ErrorKind::kInvalidArgument,
          "truncated_svd: empty matrix");
  require(all_finite(m), ErrorKind::kInvalidData, "truncated_svd: non-finite input");
  const auto max_rank = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  require(rank >= 1 && rank <= max_rank, ErrorKind::kInvalidArgument,
          "truncated_svd: rank " + std::to_string(rank) + " outside [1, " +
              std::to_string(max_rank) + "]");

  const unsigned options =
      want_right ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : Eigen::ComputeThinU;
  Eigen::BDCSVD<Matrix> svd(m, options);

  const auto r = static_cast<Eigen::Index>(rank);
  TruncatedSvd out;
  out.rank = rank;
  out.singular_values = svd.singularValues().head(r);
  out.left = svd.matrixU().leftCols(r);
  if (want_right) out.right = svd.matrixV().leftCols(r);

  const double largest = out.singular_values.size() ? out.singular_values(0) : 0.0;
  const double cutoff =
      std::max(tol.singular, static_cast<double>(std::max(m.rows(), m.cols())) *
                                 std::numeric_limits<double>::epsilon() * largest);
  Eigen::Index good = 0;
  while (good < r && out.singular_values(good) > cutoff) ++good;
  if (good < r) {
    out.rank_deficient = true;
    out.singular_values.tail(r - good).setZero();
    complete_basis(out.left, good);
    if (want_right) complete_basis(out.right, good);
  }

  const Vector signs = canonicalize_signs(out.left);
  if (want_right) out.right = out.right * signs.asDiagonal();
  return out;
}

}  // namespace

Matrix TruncatedSvd::reconstruct() const {
  return left * singular_values.asDiagonal() * right.transpose();
}

TruncatedSvd truncated_svd(const Matrix& m, std::size_t rank, const Tolerance& tol) {
  return svd_impl(m, rank, tol, true);
}

RegularizedProjector::RegularizedProjector(Matrix factor, Vector singular_values,
                                           double epsilon, bool rank_deficient)
    : factor_(std::move(factor)),
      singular_values_(std::move(singular_values)),
      epsilon_(epsilon),
      rank_deficient_(rank_deficient) {}

Matrix RegularizedProjector::apply(const Matrix& m) const {
  require(m.rows() == factor_.rows(), ErrorKind::kInvalidArgument,
          "projector: row count mismatch");
  return factor_ * (factor_.transpose() * m);
}

Matrix RegularizedProjector::dense() const { return factor_ * factor_.transpose(); }

Matrix RegularizedProjector::complement() const {
  return Matrix::Identity(factor_.rows(), factor_.rows()) - dense();
}

RegularizedProjector regularized_projector(const Matrix& x, double epsilon,
                                           std::size_t rank, const Tolerance& tol) {
  require(std::isfinite(epsilon) && epsilon >= 0.0, ErrorKind::kInvalidArgument,
          "regularized_projector: epsilon must be a finite value >= 0");
  TruncatedSvd svd = svd_impl(x, rank, tol, false);
  const Vector& s = svd.singular_values;
  if (epsilon == 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      require(s(i) > tol.singular, ErrorKind::kSingularMatrix,
              "regularized_projector: zero singular value with epsilon = 0");
    }
  }
  Vector shrink(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    shrink(i) = s(i) == 0.0 ? 0.0 : s(i) / std::sqrt(s(i) * s(i) + epsilon);
  }
  Matrix factor = svd.left * shrink.asDiagonal();
  return RegularizedProjector(std::move(factor), s, epsilon, svd.rank_deficient);
}

SymmetricEig symmetric_eig(const Matrix& m, const Tolerance& tol) {
  require(m.rows() >= 1 && m.rows() == m.cols(), ErrorKind::kInvalidArgument,
          "symmetric_eig: matrix must be square and non-empty");
  require(all_finite(m), ErrorKind::kInvalidData, "symmetric_eig: non-finite input");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  require(asym <= tol.symmetry * scale, ErrorKind::kInvalidData,
          "symmetric_eig: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  require(solver.info() == Eigen::Success, ErrorKind::kSingularMatrix,
          "symmetric_eig: eigen-solver did not converge");
  SymmetricEig out{solver.eigenvalues(), solver.eigenvectors()};
  canonicalize_signs(out.eigenvectors);
  return out;
}

namespace {

Matrix polar_impl(const Matrix& m, const Tolerance& tol, bool* completed) {
  require(m.rows() >= m.cols() && m.cols() >= 1, ErrorKind::kInvalidArgument,
          "polar_orthonormalize: need rows >= cols >= 1");
  require(all_finite(m), ErrorKind::kInvalidData, "polar_orthonormalize: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = tol.singular * std::max(1.0, s(0));
  Eigen::Index good = 0;
  while (good < s.size() && s(good) > cutoff) ++good;
  Matrix u = svd.matrixU();
  if (good < s.size()) {
    require(completed != nullptr, ErrorKind::kSingularMatrix,
            "polar_orthonormalize: rank-deficient input");
    complete_basis(u, good);
  }
  if (completed) *completed = good < s.size();
  return u * svd.matrixV().transpose();
}

}  // namespace

Matrix polar_orthonormalize(const Matrix& m, const Tolerance& tol) {
  return polar_impl(m, tol, nullptr);
}

Matrix polar_orthonormalize_completed(const Matrix& m, bool& completed, const Tolerance& tol) {
  return polar_impl(m, tol, &completed);
}

}  // namespace supalign

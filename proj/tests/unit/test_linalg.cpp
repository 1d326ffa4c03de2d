#include <doctest.h>

#include "../oracles.hpp"
#include "../test_util.hpp"
#include "supalign/errors.hpp"
#include "supalign/linalg.hpp"

using namespace supalign;

using testing::error_kind;

TEST_SUITE("linalg") {

TEST_CASE("truncated_svd of simple matrices") {
  auto id = truncated_svd(Matrix::Identity(3, 3), 3);
  CHECK((id.singular_values - Vector::Ones(3)).norm() < 1e-14);

  Matrix d = Vector{{3.0, 2.0, 1.0}}.asDiagonal();
  auto t = truncated_svd(d, 2);
  CHECK(t.singular_values(0) == doctest::Approx(3.0));
  CHECK(t.singular_values(1) == doctest::Approx(2.0));
  CHECK_FALSE(t.rank_deficient);
}

TEST_CASE("truncated_svd matches the eigendecomposition of mᵀm") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = oracle::random_matrix(6, 4, rng);
    const auto svd = truncated_svd(m, 4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    Vector ref = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    CHECK((svd.singular_values - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((svd.reconstruct() - m).norm() < 1e-8);
    CHECK((svd.left.transpose() * svd.left - Matrix::Identity(4, 4)).norm() < 1e-8);
  }
}

TEST_CASE("truncated_svd is the best rank-r approximation and monotone in rank") {
  std::mt19937_64 rng(2);
  const Matrix m = oracle::random_matrix(8, 6, rng);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= 6; ++r) {
    const auto svd = truncated_svd(m, r);
    const double err = (m - svd.reconstruct()).norm();
    // Eckart-Young: error equals the norm of the dropped singular values.
    Eigen::JacobiSVD<Matrix> ref(m);
    const double tail = ref.singularValues().tail(6 - static_cast<Eigen::Index>(r)).norm();
    CHECK(std::abs(err - tail) < 1e-8);
    CHECK(err <= previous + 1e-12);
    previous = err;
    for (Eigen::Index i = 1; i < svd.singular_values.size(); ++i) {
      CHECK(svd.singular_values(i) <= svd.singular_values(i - 1));
    }
  }
}

TEST_CASE("truncated_svd sign convention and determinism") {
  std::mt19937_64 rng(3);
  const Matrix m = oracle::random_matrix(7, 5, rng);
  const auto a = truncated_svd(m, 3);
  const auto b = truncated_svd(m, 3);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
  for (Eigen::Index c = 0; c < a.left.cols(); ++c) {
    Eigen::Index idx;
    a.left.col(c).cwiseAbs().maxCoeff(&idx);
    CHECK(a.left(idx, c) > 0.0);
  }
  const auto neg = truncated_svd(-m, 3);
  CHECK((neg.left - a.left).norm() < 1e-10);
}

TEST_CASE("truncated_svd pads rank-deficient input") {
  std::mt19937_64 rng(4);
  const Matrix u = oracle::random_matrix(6, 2, rng);
  const Matrix m = u * oracle::random_matrix(2, 5, rng);
  const auto svd = truncated_svd(m, 4);
  CHECK(svd.rank_deficient);
  CHECK(svd.singular_values(2) == 0.0);
  CHECK(svd.singular_values(3) == 0.0);
  CHECK((svd.left.transpose() * svd.left - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK((svd.right.transpose() * svd.right - Matrix::Identity(4, 4)).norm() < 1e-10);
  CHECK((svd.reconstruct() - m).norm() < 1e-10);
}

TEST_CASE("truncated_svd errors") {
  CHECK(error_kind([] { truncated_svd(Matrix::Identity(3, 3), 0); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([] { truncated_svd(Matrix::Identity(3, 3), 4); }) == ErrorKind::kInvalidArgument);
  Matrix bad = Matrix::Identity(3, 3);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK(error_kind([&] { truncated_svd(bad, 2); }) == ErrorKind::kInvalidData);
}

TEST_CASE("regularized_projector examples") {
  SUBCASE("orthonormal columns at eps 0") {
    std::mt19937_64 rng(5);
    Eigen::HouseholderQR<Matrix> qr(oracle::random_matrix(6, 3, rng));
    const Matrix q = qr.householderQ() * Matrix::Identity(6, 3);
    const auto p = regularized_projector(q, 0.0, 3);
    CHECK((p.dense() - q * q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("unit columns with eps 1 halve the projection") {
    Matrix x{{1, 0}, {0, 1}, {0, 0}};
    const auto p = regularized_projector(x, 1.0, 2);
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = expected(1, 1) = 0.5;
    CHECK((p.dense() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p.dense() - oracle::dense_projector(x, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("huge eps shrinks the projector to zero") {
    std::mt19937_64 rng(6);
    const Matrix x = oracle::random_matrix(5, 3, rng);
    CHECK(regularized_projector(x, 1e9, 3).dense().cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("regularized_projector equals the dense formula") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const auto rows = static_cast<Eigen::Index>(2 + rng() % 19);
    const auto cols = static_cast<Eigen::Index>(1 + rng() % 10);
    const Matrix x = oracle::random_matrix(rows, cols, rng);
    const auto rank = static_cast<std::size_t>(std::min(rows, cols));
    for (double eps : {0.0, 1e-4, 1.0}) {
      const Matrix ref = rows >= cols ? oracle::dense_projector(x, eps)
                                      : oracle::dense_projector_rows(x, eps);
      if (eps == 0.0 && rows < cols) continue;  // P = I; covered elsewhere
      const auto p = regularized_projector(x, eps, rank);
      CHECK((p.dense() - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("regularized projector spectrum and idempotence bound") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = oracle::random_matrix(9, 4, rng);
    for (double eps : {1e-4, 0.1, 1.0}) {
      const auto p = regularized_projector(x, eps, 4);
      const Matrix d = p.dense();
      CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      Eigen::SelfAdjointEigenSolver<Matrix> es(d);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
      CHECK(es.eigenvalues().maxCoeff() < 1.0);
      const double smin = p.singular_values().minCoeff();
      const double bound = 2.0 * eps / (smin * smin + eps) * d.norm();
      CHECK((d * d - d).norm() <= bound + 1e-12);
    }
    const Matrix d0 = regularized_projector(x, 0.0, 4).dense();
    CHECK((d0 * d0 - d0).norm() < 1e-10);
  }
}

TEST_CASE("regularized_projector apply avoids the dense matrix but agrees with it") {
  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(12, 5, rng);
  const Matrix g = oracle::random_matrix(12, 3, rng);
  const auto p = regularized_projector(x, 1e-4, 5);
  CHECK((p.apply(g) - p.dense() * g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p.complement() - (Matrix::Identity(12, 12) - p.dense())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("regularized_projector errors") {
  const Matrix x = Matrix::Identity(3, 2);
  CHECK(error_kind([&] { regularized_projector(x, -1.0, 2); }) == ErrorKind::kInvalidArgument);
  CHECK(error_kind([&] { regularized_projector(x, std::nan(""), 2); }) ==
        ErrorKind::kInvalidArgument);
  Matrix deficient(3, 2);
  deficient << 1, 2, 2, 4, 3, 6;
  CHECK(error_kind([&] { regularized_projector(deficient, 0.0, 2); }) == ErrorKind::kSingularMatrix);
  const auto padded = regularized_projector(deficient, 1e-4, 2);
  CHECK(padded.rank_deficient());
}

TEST_CASE("symmetric_eig examples") {
  const auto id = symmetric_eig(Matrix::Identity(4, 4));
  CHECK((id.eigenvalues - Vector::Ones(4)).norm() < 1e-14);
  Matrix d = Vector{{5.0, 1.0, 3.0}}.asDiagonal();
  const auto e = symmetric_eig(d);
  CHECK(e.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(3.0));
  CHECK(e.eigenvalues(2) == doctest::Approx(5.0));
}

TEST_CASE("symmetric_eig residual and orthonormality") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = oracle::random_matrix(5, 5, rng);
    const Matrix m = a + a.transpose();
    const auto e = symmetric_eig(m);
    CHECK((m * e.eigenvectors - e.eigenvectors * e.eigenvalues.asDiagonal()).norm() < 1e-8);
    CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(5, 5)).norm() < 1e-10);
    for (Eigen::Index i = 1; i < 5; ++i) CHECK(e.eigenvalues(i) >= e.eigenvalues(i - 1));
  }
}

TEST_CASE("symmetric_eig rejects bad input") {
  Matrix asym{{1, 2}, {0, 1}};
  CHECK(error_kind([&] { symmetric_eig(asym); }) == ErrorKind::kInvalidData);
  CHECK(error_kind([] { symmetric_eig(Matrix::Ones(2, 3)); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("polar orthonormalization") {
  std::mt19937_64 rng(11);
  const Matrix m = oracle::random_matrix(6, 3, rng);
  const Matrix q = polar_orthonormalize(m);
  CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() < 1e-12);
  // Same column space.
  CHECK((q * q.transpose() * m - m).norm() < 1e-10);

  Matrix deficient = m;
  deficient.col(2) = deficient.col(0) + deficient.col(1);
  CHECK(error_kind([&] { polar_orthonormalize(deficient); }) == ErrorKind::kSingularMatrix);
  bool completed = false;
  const Matrix c = polar_orthonormalize_completed(deficient, completed);
  CHECK(completed);
  CHECK((c.transpose() * c - Matrix::Identity(3, 3)).norm() < 1e-10);
}

}  // TEST_SUITE

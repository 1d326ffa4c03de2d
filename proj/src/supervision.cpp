#include "supalign/supervision.hpp"

#include <cmath>
#include <string>

#include "supalign/errors.hpp"

namespace supalign {

namespace {

void check_gamma(std::size_t t, double gamma) {
  require(t >= 1, ErrorKind::kInvalidArgument, "supervision: need at least one time point");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorKind::kInvalidArgument,
          "supervision: gamma must be >= 0");
  require(gamma * static_cast<double>(t) < 1.0, ErrorKind::kInvalidArgument,
          "supervision: gamma = " + std::to_string(gamma) + " >= 1/T = " +
              std::to_string(1.0 / static_cast<double>(t)) +
              "; results are highly unstable at or beyond 1/T");
}

}  // namespace

Matrix build_h(std::size_t t, double gamma) {
  require(t >= 1, ErrorKind::kInvalidArgument, "build_h: need at least one time point");
  require(std::isfinite(gamma), ErrorKind::kInvalidArgument, "build_h: gamma must be finite");
  const auto n = static_cast<Eigen::Index>(t);
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, gamma);
}

double det_h(std::size_t t, double gamma) {
  require(t >= 1, ErrorKind::kInvalidArgument, "det_h: need at least one time point");
  return 1.0 - gamma * static_cast<double>(t);
}

double default_gamma(std::size_t labeled_timepoints) {
  require(labeled_timepoints >= 1, ErrorKind::kInvalidArgument,
          "default_gamma: no labeled time points");
  return 1.0 / (2.0 * static_cast<double>(labeled_timepoints));
}

SupervisionKernel build_kernel(const LabelMatrix& labels, std::optional<double> gamma) {
  const auto labeled = labels.labeled_indices();
  const std::size_t t = labeled.size();
  require(t >= 1, ErrorKind::kInvalidArgument, "build_kernel: no labeled time points");
  const double g = gamma.value_or(default_gamma(t));
  check_gamma(t, g);
  const Matrix h = build_h(t, g);

  const Matrix& y = labels.y();
  Matrix y_labeled(y.rows(), static_cast<Eigen::Index>(t));
  for (std::size_t j = 0; j < t; ++j) y_labeled.col(static_cast<Eigen::Index>(j)) = y.col(labeled[j]);
  const Matrix k_labeled = y_labeled * h;

  SupervisionKernel kernel;
  kernel.k = Matrix::Zero(y.rows(), y.cols());
  for (std::size_t j = 0; j < t; ++j) kernel.k.col(labeled[j]) = k_labeled.col(static_cast<Eigen::Index>(j));
  kernel.gamma = g;
  kernel.t = t;
  return kernel;
}

SupervisionKernel identity_kernel(std::size_t t) {
  require(t >= 1, ErrorKind::kInvalidArgument, "identity_kernel: need at least one time point");
  const auto n = static_cast<Eigen::Index>(t);
  return SupervisionKernel{Matrix::Identity(n, n), 0.0, t};
}

Matrix SupervisionKernel::apply(const Matrix& x) const {
  require(x.rows() == k.cols(), ErrorKind::kInvalidArgument,
          "kernel: subject has " + std::to_string(x.rows()) + " time points, kernel expects " +
              std::to_string(k.cols()));
  return k * x;
}

std::vector<SupervisionKernel> build_kernels(const Dataset& d, std::optional<double> gamma) {
  std::vector<SupervisionKernel> out;
  out.reserve(d.num_subjects());
  for (const auto& labels : d.labels) out.push_back(build_kernel(labels, gamma));
  return out;
}

}  // namespace supalign

#include "hdc/gp.hpp"

#include <cmath>

#include "hdc/core.hpp"

namespace hdc {

double GaussianProcess::matern52(const Point& a, const Point& b, double length_scale) noexcept {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double r = std::sqrt(5.0 * (dx * dx + dy * dy)) / length_scale;
  return (1.0 + r + r * r / 3.0) * std::exp(-r);
}

GaussianProcess::GaussianProcess(std::span<const Point> xs, std::span<const double> ys, const Params& params)
    : xs_(xs.begin(), xs.end()), params_(params) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::kShape, "GP inputs and targets differ in count");
  if (!(params.length_scale > 0.0 && params.amplitude > 0.0 && params.noise >= 0.0)) {
    throw Error(ErrorKind::kParameter, "GP needs positive length scale and amplitude");
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n == 0) return;
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = params.amplitude * matern52(xs_[i], xs_[j], params.length_scale);
    }
    k(i, i) += params.noise;
  }
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) throw Error(ErrorKind::kParameter, "GP kernel matrix is not positive definite");
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = ys[static_cast<std::size_t>(i)] - params.mean;
  alpha_ = chol_.solve(y);
}

GaussianProcess::Posterior GaussianProcess::predict(const Point& x) const {
  const auto n = static_cast<Eigen::Index>(xs_.size());
  if (n == 0) return {params_.mean, std::sqrt(params_.amplitude)};
  Eigen::VectorXd ks(n);
  for (Eigen::Index i = 0; i < n; ++i) ks(i) = params_.amplitude * matern52(xs_[i], x, params_.length_scale);
  const double mean = params_.mean + ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(params_.amplitude - v.squaredNorm(), 0.0);
  return {mean, std::sqrt(var)};
}

}  // namespace hdc

#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hdc {

// Gaussian-process regression on the unit square with a Matern-5/2 kernel
// and fixed hyperparameters.
class GaussianProcess {
 public:
  using Point = std::array<double, 2>;

  struct Params {
    double length_scale = 0.3;
    double amplitude = 1.0;  // prior variance
    double noise = 1e-4;
    double mean = 0.0;       // constant prior mean
  };

  struct Posterior {
    double mean = 0.0;
    double stddev = 0.0;
  };

  GaussianProcess(std::span<const Point> xs, std::span<const double> ys, const Params& params);

  [[nodiscard]] Posterior predict(const Point& x) const;
  [[nodiscard]] std::size_t size() const noexcept { return xs_.size(); }

  static double matern52(const Point& a, const Point& b, double length_scale) noexcept;

 private:
  std::vector<Point> xs_;
  Params params_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

}  // namespace hdc

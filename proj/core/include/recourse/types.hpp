#pragma once

#include <Eigen/Core>

#include "recourse/error.hpp"

namespace recourse {

using Vector = Eigen::VectorXd;
// Row-major so that one row is one instance laid out contiguously.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Decision threshold theta in (0,1); a prediction is positive iff f(x) > theta.
class Threshold {
 public:
  constexpr Threshold() = default;
  explicit Threshold(double theta) : value_(theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw Error("threshold must lie in (0,1)");
  }
  constexpr double value() const noexcept { return value_; }
  constexpr bool accepts(double proba) const noexcept { return proba > value_; }

 private:
  double value_ = 0.5;
};

}  // namespace recourse

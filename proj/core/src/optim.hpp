#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace recourse::detail {

// RMSProp over a fixed set of parameter blocks.
class RmsProp {
 public:
  RmsProp(double lr, double rho, double eps, const std::vector<std::size_t>& sizes)
      : lr_(lr), rho_(rho), eps_(eps) {
    for (auto n : sizes) cache_.emplace_back(n, 0.0);
  }

  void step(std::size_t block, double* params, const double* grads) {
    auto& v = cache_[block];
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = rho_ * v[i] + (1.0 - rho_) * grads[i] * grads[i];
      params[i] -= lr_ * grads[i] / (std::sqrt(v[i]) + eps_);
    }
  }

 private:
  double lr_, rho_, eps_;
  std::vector<std::vector<double>> cache_;
};

// Adam with bias correction. Call tick() once per optimization step.
class Adam {
 public:
  Adam(double lr, const std::vector<std::size_t>& sizes, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto n : sizes) {
      m_.emplace_back(n, 0.0);
      v_.emplace_back(n, 0.0);
    }
  }

  void tick() {
    ++t_;
    c1_ = 1.0 - std::pow(beta1_, t_);
    c2_ = 1.0 - std::pow(beta2_, t_);
  }

  void step(std::size_t block, double* params, const double* grads) {
    auto& m = m_[block];
    auto& v = v_[block];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grads[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grads[i] * grads[i];
      params[i] -= lr_ * (m[i] / c1_) / (std::sqrt(v[i] / c2_) + eps_);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  double c1_ = 1.0, c2_ = 1.0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace recourse::detail

#include "recourse/lime.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace recourse {

LocalLinearModel lime_fit(const Classifier& model, const Vector& x, const LimeConfig& cfg) {
  const auto d = x.size();
  check_dim(model.input_dim(), static_cast<std::size_t>(d));
  if (cfg.n_samples < static_cast<std::size_t>(d) + 2) {
    throw ConfigError("lime needs at least d + 2 samples");
  }
  if (cfg.perturbation_scale.size() != 0 && cfg.perturbation_scale.size() != d) {
    throw DimensionError(static_cast<std::size_t>(d), static_cast<std::size_t>(cfg.perturbation_scale.size()));
  }
  if (!cfg.binary_mask.empty()) check_dim(static_cast<std::size_t>(d), cfg.binary_mask.size());
  const double width = cfg.kernel_width > 0.0 ? cfg.kernel_width : 0.75 * std::sqrt(static_cast<double>(d));
  const Vector scale = cfg.perturbation_scale.size() == 0 ? Vector::Constant(d, 0.1) : cfg.perturbation_scale;

  const auto n = static_cast<Eigen::Index>(cfg.n_samples);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution flip(cfg.flip_probability);

  // Row 0 is the anchor itself.
  Matrix samples(n, d);
  samples.row(0) = x.transpose();
  for (Eigen::Index i = 1; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const bool binary = !cfg.binary_mask.empty() && cfg.binary_mask[static_cast<std::size_t>(j)];
      samples(i, j) = binary ? (flip(rng) ? 1.0 - x[j] : x[j]) : x[j] + scale[j] * normal(rng);
    }
  }
  const Vector y = model.predict_proba(samples);

  Eigen::MatrixXd design(n, d + 1);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector offset = samples.row(i).transpose() - x;
    w[i] = std::exp(-offset.squaredNorm() / (width * width));
    design(i, 0) = 1.0;
    design.row(i).tail(d) = offset.transpose();
  }
  const Eigen::MatrixXd gram = design.transpose() * w.asDiagonal() * design;
  const Vector rhs = design.transpose() * w.asDiagonal() * y;

  LocalLinearModel out;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(1e-10);
  Vector beta;
  if (lu.rank() == gram.rows()) {
    beta = lu.solve(rhs);
  } else {
    out.ridge_fallback = true;
    beta = (gram + 1e-6 * Eigen::MatrixXd::Identity(d + 1, d + 1)).ldlt().solve(rhs);
  }

  out.coefficients = beta.tail(d);
  out.intercept = beta[0] - out.coefficients.dot(x);
  out.anchor = x;
  out.kernel_width = width;

  const Vector fitted = design * beta;
  const double wsum = w.sum();
  const double mean = w.dot(y) / wsum;
  const double ss_res = w.dot((y - fitted).array().square().matrix());
  const double ss_tot = w.dot((y.array() - mean).square().matrix());
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

}  // namespace recourse

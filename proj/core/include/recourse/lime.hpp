#pragma once

#include <cstdint>
#include <vector>

#include "recourse/model.hpp"
#include "recourse/types.hpp"

namespace recourse {

// Local linear approximation score(x) = intercept + coefficients . x of a
// classifier's probability around `anchor`.
struct LocalLinearModel {
  Vector coefficients;
  double intercept = 0.0;
  Vector anchor;
  double kernel_width = 0.0;
  // Weighted R^2 on the perturbation sample the fit used.
  double r_squared = 0.0;
  // Set when the weighted normal equations were singular and a ridge term was added.
  bool ridge_fallback = false;

  double score(const Vector& x) const { return intercept + coefficients.dot(x); }
};

struct LimeConfig {
  std::size_t n_samples = 1000;
  // <= 0 selects 0.75 * sqrt(d).
  double kernel_width = 0.0;
  std::uint64_t seed = 0;
  // Per-coordinate Gaussian standard deviation for continuous coordinates.
  // Empty: 0.1 for every coordinate.
  Vector perturbation_scale;
  // Coordinates flagged here are flipped with `flip_probability` instead.
  std::vector<bool> binary_mask;
  double flip_probability = 0.1;
};

// Kernel-weighted least squares on perturbations around x, weights
// exp(-||s - x||^2 / width^2). Deterministic for a fixed seed.
LocalLinearModel lime_fit(const Classifier& model, const Vector& x, const LimeConfig& cfg = {});

}  // namespace recourse

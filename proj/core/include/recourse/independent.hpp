#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "recourse/lime.hpp"
#include "recourse/model.hpp"
#include "recourse/problem.hpp"
#include "recourse/vae.hpp"

namespace recourse {

// --- Wachter -----------------------------------------------------------------

struct WachterParams {
  double learning_rate = 0.01;
  double lambda_init = 0.01;
  double lambda_growth = 1.5;
  int max_iters = 2000;
  // An inner loop ends after this many steps or once an iterate stops moving.
  int inner_iters = 100;
  double tolerance = 1e-6;

  void validate() const;
};

// Optional diagnostics from a Wachter run.
struct WachterTrace {
  std::vector<double> lambdas;
};

// Proximal gradient descent on lambda * BCE(f(x'), 1) + ||x' - x||_1 with
// lambda growing after every inner loop that ends below the threshold.
// Binary coordinates are rounded before each validity check.
CounterfactualResult wachter(const RecourseProblem& p, const WachterParams& params = {},
                             WachterTrace* trace = nullptr);

// --- Growing Spheres -----------------------------------------------------------

struct GsParams {
  double step = 0.02;
  int samples_per_shell = 500;
  int max_shells = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

// Uniform samples in l2 shells [r, r + step) over the mutable continuous
// coordinates; mutable binary coordinates are redrawn Bernoulli(0.5). Returns the
// positive sample with the smallest l1 distance from the first shell holding any.
CounterfactualResult growing_spheres(const RecourseProblem& p, const GsParams& params = {});

// --- CEM -----------------------------------------------------------------------

struct CemParams {
  double l1_weight = 0.9;
  double l2_weight = 0.1;
  // > 0 adds vae_weight * ||x' - reconstruct(x')||^2 and requires a VAE.
  double vae_weight = 0.0;
  double learning_rate = 0.01;
  int max_iters = 1000;
  // Weight of the hinge term; multiplied by confidence_growth after every block of
  // block_iters steps that found no feasible point.
  double confidence_init = 1.0;
  double confidence_growth = 2.0;
  int block_iters = 50;
  double margin = 0.05;

  void validate() const;
};

// ISTA on c * max(0, theta + margin - f) + l2 ||d||^2 (+ VAE term), soft
// thresholding with l1_weight * learning_rate toward the factual. Returns the
// feasible iterate with the lowest elastic-net cost.
CounterfactualResult cem(const RecourseProblem& p, const CemParams& params = {},
                         std::shared_ptr<const Vae> vae = nullptr);

// --- DICE, single counterfactual -------------------------------------------------

struct DiceParams {
  double proximity_weight = 0.5;
  // Kept for config compatibility; one counterfactual is generated so it is unused.
  double diversity_weight = 0.0;
  double learning_rate = 0.05;
  int max_iters = 1000;
  double validity_weight_init = 1.0;
  double validity_weight_growth = 2.0;
  // Steps without a 1e-3 gain in f before the validity weight grows.
  int patience = 25;
  double margin = 0.05;

  void validate() const;
};

// Gradient steps on w * max(0, theta + margin - f) + proximity_weight/d * l1,
// projected onto the action set after every step. Returns the first iterate that
// crosses the threshold once binary coordinates are rounded.
CounterfactualResult dice_single(const RecourseProblem& p, const DiceParams& params = {});

// --- Actionable recourse ----------------------------------------------------------

struct ArParams {
  int grid_steps = 10;
  std::size_t flipset_size = 150;
  std::size_t max_expansions = 200000;

  void validate() const;
};

// score(x) = intercept + coef . x, positive iff score > threshold.
struct LinearScore {
  Vector coefficients;
  double intercept = 0.0;
  double threshold = 0.0;

  // Logit space: threshold = logit(theta).
  static LinearScore from_model(const LinearModel& model, Threshold theta);
  // Probability space: threshold = theta.
  static LinearScore from_surrogate(const LocalLinearModel& local, Threshold theta);

  double score(const Vector& x) const { return intercept + coefficients.dot(x); }
};

// A discrete action: per-feature offsets from the factual and their l1 cost.
struct Action {
  Vector delta;
  double cost = 0.0;
};

// Per-feature move lists: offsets k / grid_steps within the action set, binary
// features may flip. Only moves that raise the score are kept.
std::vector<std::vector<double>> action_grid(const RecourseProblem& p, const LinearScore& score,
                                             const ArParams& params);

// Up to flipset_size score-crossing actions in nondecreasing l1 cost, one per
// distinct set of changed features, found by best-first search with an
// admissible fractional-knapsack bound.
std::vector<Action> flipset(const RecourseProblem& p, const LinearScore& score,
                            const ArParams& params = {});

// Returns the cheapest flipset action that the true classifier accepts.
CounterfactualResult actionable_recourse(const RecourseProblem& p, const LinearScore& score,
                                         const ArParams& params = {});
CounterfactualResult actionable_recourse(const RecourseProblem& p, const LinearModel& model,
                                         const ArParams& params = {});
CounterfactualResult actionable_recourse(const RecourseProblem& p, const LocalLinearModel& local,
                                         const ArParams& params = {});
// Fits a local surrogate around the factual, then runs actionable_recourse on it.
CounterfactualResult ar_lime(const RecourseProblem& p, const ArParams& params = {},
                             const LimeConfig& lime = {});

}  // namespace recourse

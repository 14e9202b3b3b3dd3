#include "recourse/independent.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "math.hpp"
#include "timing.hpp"

namespace recourse {

// Smallest gain in f that resets the validity-weight patience counter.
constexpr double kMinProgress = 1e-3;

// --- Wachter -------------------------------------------------------------------------

void WachterParams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("wachter learning_rate must be > 0");
  if (!(lambda_init > 0.0)) throw ConfigError("wachter lambda_init must be > 0");
  if (!(lambda_growth > 1.0)) throw ConfigError("wachter lambda_growth must be > 1");
  if (max_iters < 1 || inner_iters < 1) throw ConfigError("wachter iteration budgets must be >= 1");
  if (!(tolerance >= 0.0)) throw ConfigError("wachter tolerance must be >= 0");
}

CounterfactualResult wachter(const RecourseProblem& p, const WachterParams& params, WachterTrace* trace) {
  params.validate();
  detail::Stopwatch sw;
  const Classifier& f = p.model();
  const Vector& x0 = p.factual();
  Vector x = x0;
  double lambda = params.lambda_init;
  if (trace) trace->lambdas.assign(1, lambda);
  int iter = 0;
  while (iter < params.max_iters) {
    for (int inner = 0; inner < params.inner_iters && iter < params.max_iters; ++inner) {
      ++iter;
      // d/dx of -log f(x) is -(1 - f) * d logit / dx.
      const double fx = f.predict_proba(x);
      const Vector grad = -(1.0 - fx) * f.logit_gradient(x);
      Vector next = detail::prox_l1(x - params.learning_rate * lambda * grad, x0, params.learning_rate);
      next = clamp_to_range(p, next);
      const double moved = (next - x).lpNorm<Eigen::Infinity>();
      x = std::move(next);
      Vector candidate = round_binary(p, x);
      if (p.theta().accepts(f.predict_proba(candidate))) {
        return detail::stamped(finalize(p, std::move(candidate), "wachter", iter), sw);
      }
      if (moved <= params.tolerance) break;
    }
    lambda *= params.lambda_growth;
    if (trace) trace->lambdas.push_back(lambda);
  }
  return detail::stamped(finalize(p, std::nullopt, "wachter", iter, kBudgetExhausted), sw);
}

// --- Growing Spheres --------------------------------------------------------------------

void GsParams::validate() const {
  if (!(step > 0.0)) throw ConfigError("growing spheres step must be > 0");
  if (samples_per_shell < 1 || max_shells < 1) throw ConfigError("growing spheres budgets must be >= 1");
}

CounterfactualResult growing_spheres(const RecourseProblem& p, const GsParams& params) {
  params.validate();
  detail::Stopwatch sw;
  const Vector& x0 = p.factual();
  const auto& frozen = p.actions().frozen;
  std::vector<Eigen::Index> continuous, binary;
  for (std::size_t j = 0; j < p.dim(); ++j) {
    if (frozen[j]) continue;
    (p.binary_mask()[j] ? binary : continuous).push_back(static_cast<Eigen::Index>(j));
  }
  const auto n = static_cast<double>(continuous.size());
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  const auto rows = static_cast<Eigen::Index>(params.samples_per_shell);
  const auto k = static_cast<Eigen::Index>(continuous.size());
  const Eigen::RowVectorXd lower = p.actions().lower.transpose();
  const Eigen::RowVectorXd upper = p.actions().upper.transpose();
  Matrix samples(rows, x0.size());
  Matrix directions(rows, k);
  for (int shell = 0; shell < params.max_shells; ++shell) {
    const double a = shell * params.step;
    const double b = (shell + 1) * params.step;
    const double an = std::pow(a, n);
    const double bn = std::pow(b, n);
    samples.rowwise() = x0.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (k > 0) {
        for (Eigen::Index c = 0; c < k; ++c) directions(i, c) = normal(rng);
        const double r = std::pow(an + uniform(rng) * (bn - an), 1.0 / n);
        directions.row(i) *= r / directions.row(i).norm();
        for (Eigen::Index c = 0; c < k; ++c) samples(i, continuous[static_cast<std::size_t>(c)]) += directions(i, c);
      }
      for (auto j : binary) samples(i, j) = coin(rng) ? 1.0 : 0.0;
    }
    samples = samples.cwiseMax(lower.replicate(rows, 1)).cwiseMin(upper.replicate(rows, 1));
    const Vector proba = p.model().predict_proba(samples);
    Eigen::Index best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!p.theta().accepts(proba[i])) continue;
      const double cost = (samples.row(i) - x0.transpose()).lpNorm<1>();
      if (cost < best_cost) {
        best_cost = cost;
        best = i;
      }
    }
    if (best >= 0) {
      return detail::stamped(
          finalize(p, Vector(samples.row(best).transpose()), "growing_spheres", shell + 1), sw);
    }
  }
  return detail::stamped(finalize(p, std::nullopt, "growing_spheres", params.max_shells), sw);
}

// --- CEM ---------------------------------------------------------------------------------

void CemParams::validate() const {
  if (l1_weight < 0.0 || l2_weight < 0.0 || vae_weight < 0.0) throw ConfigError("cem weights must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("cem learning_rate must be > 0");
  if (max_iters < 1 || block_iters < 1) throw ConfigError("cem iteration budgets must be >= 1");
  if (!(confidence_init > 0.0) || !(confidence_growth > 1.0)) {
    throw ConfigError("cem confidence must start > 0 and grow by > 1");
  }
  if (margin < 0.0) throw ConfigError("cem margin must be >= 0");
}

CounterfactualResult cem(const RecourseProblem& p, const CemParams& params, std::shared_ptr<const Vae> vae) {
  params.validate();
  const bool use_vae = params.vae_weight > 0.0;
  if (use_vae != static_cast<bool>(vae)) {
    throw ConfigError("cem needs a vae exactly when vae_weight > 0");
  }
  const char* name = use_vae ? "cem_vae" : "cem";
  detail::Stopwatch sw;
  const Classifier& f = p.model();
  const Vector& x0 = p.factual();
  const double target = p.theta().value() + params.margin;
  Vector x = x0;
  double confidence = params.confidence_init;
  std::optional<Vector> best;
  double best_cost = std::numeric_limits<double>::infinity();
  int iter = 0;
  while (iter < params.max_iters) {
    ++iter;
    const double fx = f.predict_proba(x);
    Vector grad = 2.0 * params.l2_weight * (x - x0);
    if (fx < target) grad -= confidence * f.input_gradient(x);
    if (use_vae) {
      const Vector z = vae->encode(x);
      const Vector e = x - vae->decode(z);
      grad += params.vae_weight * 2.0 * (e - vae->encode_vjp(x, vae->decode_vjp(z, e)));
    }
    x = clamp_to_range(p, detail::prox_l1(x - params.learning_rate * grad, x0,
                                          params.learning_rate * params.l1_weight));
    if (p.theta().accepts(f.predict_proba(x))) {
      const Vector d = x - x0;
      const double cost = params.l1_weight * d.lpNorm<1>() + params.l2_weight * d.squaredNorm();
      if (cost < best_cost) {
        best_cost = cost;
        best = x;
      }
    }
    if (iter % params.block_iters == 0) {
      if (best) break;
      confidence *= params.confidence_growth;
    }
  }
  return detail::stamped(finalize(p, std::move(best), name, iter, kBudgetExhausted), sw);
}

// --- DICE ---------------------------------------------------------------------------------

void DiceParams::validate() const {
  if (proximity_weight < 0.0 || diversity_weight < 0.0) throw ConfigError("dice weights must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("dice learning_rate must be > 0");
  if (max_iters < 1 || patience < 1) throw ConfigError("dice budgets must be >= 1");
  if (!(validity_weight_init > 0.0) || !(validity_weight_growth > 1.0)) {
    throw ConfigError("dice validity weight must start > 0 and grow by > 1");
  }
  if (margin < 0.0) throw ConfigError("dice margin must be >= 0");
}

CounterfactualResult dice_single(const RecourseProblem& p, const DiceParams& params) {
  params.validate();
  detail::Stopwatch sw;
  const Classifier& f = p.model();
  const Vector& x0 = p.factual();
  const double target = p.theta().value() + params.margin;
  const double shrink = params.learning_rate * params.proximity_weight / static_cast<double>(p.dim());
  Vector x = x0;
  double weight = params.validity_weight_init;
  double best_f = p.factual_proba();
  int stall = 0;
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    const double fx = f.predict_proba(x);
    Vector step = x;
    if (fx < target) step += params.learning_rate * weight * f.input_gradient(x);
    x = project_to_actions(p, detail::prox_l1(step, x0, shrink));
    Vector candidate = round_binary(p, x);
    const double fc = f.predict_proba(candidate);
    if (p.theta().accepts(fc)) {
      return detail::stamped(finalize(p, std::move(candidate), "dice", iter), sw);
    }
    const double fnew = f.predict_proba(x);
    if (fnew > best_f + kMinProgress) {
      best_f = fnew;
      stall = 0;
    } else if (++stall >= params.patience) {
      weight *= params.validity_weight_growth;
      stall = 0;
    }
  }
  return detail::stamped(finalize(p, std::nullopt, "dice", params.max_iters, kBudgetExhausted), sw);
}

}  // namespace recourse

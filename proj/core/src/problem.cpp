#include "recourse/problem.hpp"

#include <algorithm>
#include <cmath>

#include "math.hpp"

namespace recourse {

ActionSet ActionSet::from_schema(const Schema& schema, const Vector& factual) {
  const auto d = factual.size();
  check_dim(schema.size(), static_cast<std::size_t>(d));
  ActionSet a;
  a.range_lower = factual.cwiseMin(0.0);
  a.range_upper = factual.cwiseMax(1.0);
  a.lower = a.range_lower;
  a.upper = a.range_upper;
  a.frozen.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& f = schema[static_cast<std::size_t>(j)];
    if (f.immutable) {
      a.frozen[static_cast<std::size_t>(j)] = true;
      a.lower[j] = a.upper[j] = factual[j];
    } else if (f.direction == Direction::IncreaseOnly) {
      a.lower[j] = factual[j];
    } else if (f.direction == Direction::DecreaseOnly) {
      a.upper[j] = factual[j];
    }
  }
  return a;
}

bool ActionSet::admits(const Vector& candidate) const {
  if (candidate.size() != lower.size()) return false;
  for (Eigen::Index j = 0; j < candidate.size(); ++j) {
    if (candidate[j] < lower[j] || candidate[j] > upper[j]) return false;
  }
  return true;
}

RecourseProblem::RecourseProblem(std::shared_ptr<const Classifier> model, Vector factual, Schema schema,
                                 Threshold theta, CostWeights weights)
    : model_(std::move(model)),
      factual_(std::move(factual)),
      schema_(std::move(schema)),
      theta_(theta),
      weights_(weights) {
  if (!model_) throw Error("recourse problem needs a model");
  check_dim(model_->input_dim(), static_cast<std::size_t>(factual_.size()));
  check_dim(schema_.size(), static_cast<std::size_t>(factual_.size()));
  if (!factual_.allFinite()) throw Error("factual has non-finite values");
  if (weights_.l0 < 0.0 || weights_.l1 < 0.0 || std::abs(weights_.l0 + weights_.l1 - 1.0) > 1e-12) {
    throw Error("cost weights must be a convex combination");
  }
  factual_proba_ = model_->predict_proba(factual_);
  if (!(factual_proba_ < theta_.value())) {
    throw Error("factual is not negatively classified");
  }
  actions_ = ActionSet::from_schema(schema_, factual_);
  binary_ = schema_.binary_mask();
}

Vector project_to_actions(const RecourseProblem& p, const Vector& candidate) {
  check_dim(p.dim(), static_cast<std::size_t>(candidate.size()));
  return detail::clamp(candidate, p.actions().lower, p.actions().upper);
}

Vector clamp_to_range(const RecourseProblem& p, const Vector& candidate) {
  check_dim(p.dim(), static_cast<std::size_t>(candidate.size()));
  return detail::clamp(candidate, p.actions().range_lower, p.actions().range_upper);
}

Vector round_binary(const RecourseProblem& p, const Vector& candidate) {
  check_dim(p.dim(), static_cast<std::size_t>(candidate.size()));
  Vector out = candidate;
  for (std::size_t j = 0; j < p.dim(); ++j) {
    if (p.binary_mask()[j]) {
      const auto i = static_cast<Eigen::Index>(j);
      out[i] = out[i] >= 0.5 ? 1.0 : 0.0;
    }
  }
  return out;
}

CounterfactualResult finalize(const RecourseProblem& p, std::optional<Vector> candidate, std::string method,
                              int iterations, std::string failure_reason) {
  CounterfactualResult r;
  r.method_name = std::move(method);
  r.iterations = iterations;
  if (candidate && static_cast<std::size_t>(candidate->size()) == p.dim() && candidate->allFinite() &&
      p.theta().accepts(p.model().predict_proba(*candidate))) {
    r.status = Status::Success;
    r.delta = *candidate - p.factual();
    r.counterfactual = std::move(candidate);
    return r;
  }
  r.status = Status::Failure;
  r.failure_reason = std::move(failure_reason);
  return r;
}

LatentProblem::LatentProblem(RecourseProblem problem, std::shared_ptr<const Vae> vae, double half_width)
    : problem_(std::move(problem)), vae_(std::move(vae)) {
  if (!vae_) throw Error("latent problem needs a vae");
  if (!(half_width > 0.0)) throw Error("latent half width must be > 0");
  check_dim(vae_->input_dim(), problem_.dim());
  z0_ = vae_->encode(problem_.factual());
  lower_ = z0_.array() - half_width;
  upper_ = z0_.array() + half_width;
}

Vector LatentProblem::clamp_latent(const Vector& z) const {
  check_dim(static_cast<std::size_t>(z0_.size()), static_cast<std::size_t>(z.size()));
  return detail::clamp(z, lower_, upper_);
}

bool LatentProblem::contains(const Vector& z) const {
  return z.size() == z0_.size() && (z.array() >= lower_.array()).all() && (z.array() <= upper_.array()).all();
}

}  // namespace recourse

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/model.hpp"
#include "recourse/types.hpp"
#include "recourse/vae.hpp"

namespace recourse {

// Admissible changes per feature, in encoded units.
struct ActionSet {
  // Feature range [min(0, x_j), max(1, x_j)], ignoring frozen/direction rules.
  Vector range_lower;
  Vector range_upper;
  // Range further narrowed by direction restrictions and frozen features.
  Vector lower;
  Vector upper;
  std::vector<bool> frozen;

  static ActionSet from_schema(const Schema& schema, const Vector& factual);
  bool admits(const Vector& candidate) const;
};

// Convex combination weights for the l0 / l1 costs.
struct CostWeights {
  double l0 = 0.0;
  double l1 = 1.0;
};

// One negatively classified factual and the constraints on its recourse.
class RecourseProblem {
 public:
  // Throws Error unless f(factual) < theta.
  RecourseProblem(std::shared_ptr<const Classifier> model, Vector factual, Schema schema,
                  Threshold theta = Threshold{}, CostWeights weights = {});

  const Classifier& model() const noexcept { return *model_; }
  const std::shared_ptr<const Classifier>& model_ptr() const noexcept { return model_; }
  const Vector& factual() const noexcept { return factual_; }
  const Schema& schema() const noexcept { return schema_; }
  Threshold theta() const noexcept { return theta_; }
  CostWeights cost_weights() const noexcept { return weights_; }
  const ActionSet& actions() const noexcept { return actions_; }
  const std::vector<bool>& binary_mask() const noexcept { return binary_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(factual_.size()); }
  double factual_proba() const noexcept { return factual_proba_; }

 private:
  std::shared_ptr<const Classifier> model_;
  Vector factual_;
  Schema schema_;
  Threshold theta_;
  CostWeights weights_;
  ActionSet actions_;
  std::vector<bool> binary_;
  double factual_proba_ = 0.0;
};

// Frozen coordinates reset to the factual, direction-restricted ones clamped to
// the allowed side, everything clamped to the feature range.
Vector project_to_actions(const RecourseProblem& p, const Vector& candidate);
// Feature range only; used by methods without immutable handling.
Vector clamp_to_range(const RecourseProblem& p, const Vector& candidate);
// Binary coordinates rounded at 0.5.
Vector round_binary(const RecourseProblem& p, const Vector& candidate);

enum class Status { Success, Failure };

struct CounterfactualResult {
  Status status = Status::Failure;
  std::string failure_reason;
  std::optional<Vector> counterfactual;
  Vector delta;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  std::string method_name;

  bool success() const noexcept { return status == Status::Success; }
};

// Failure reasons shared by the methods.
inline constexpr const char* kBudgetExhausted = "budget_exhausted";
inline constexpr const char* kNoValidatedAction = "no_validated_action";
inline constexpr const char* kNoReachablePositive = "no_reachable_positive";

// The single place success is decided: success iff a candidate exists and
// f(candidate) > theta strictly.
CounterfactualResult finalize(const RecourseProblem& p, std::optional<Vector> candidate,
                              std::string method, int iterations,
                              std::string failure_reason = kBudgetExhausted);

// Recourse problem searched through a generative model's latent space.
class LatentProblem {
 public:
  LatentProblem(RecourseProblem problem, std::shared_ptr<const Vae> vae, double half_width = 3.0);

  const RecourseProblem& problem() const noexcept { return problem_; }
  const Vae& vae() const noexcept { return *vae_; }
  // encode(factual), the search's starting point.
  const Vector& initial_latent() const noexcept { return z0_; }
  const Vector& latent_lower() const noexcept { return lower_; }
  const Vector& latent_upper() const noexcept { return upper_; }
  Vector clamp_latent(const Vector& z) const;
  bool contains(const Vector& z) const;

 private:
  RecourseProblem problem_;
  std::shared_ptr<const Vae> vae_;
  Vector z0_, lower_, upper_;
};

}  // namespace recourse

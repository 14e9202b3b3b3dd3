#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "recourse/problem.hpp"

using namespace recourse;

namespace {

// Features: age (immutable), hours (increase only), debt (decrease only),
// married (binary), free.
Schema mixed_schema() {
  std::vector<FeatureSchema> f(5);
  f[0].name = "age";
  f[0].immutable = true;
  f[1].name = "hours";
  f[1].direction = Direction::IncreaseOnly;
  f[2].name = "debt";
  f[2].direction = Direction::DecreaseOnly;
  f[3].name = "married";
  f[3].kind = FeatureKind::BinaryCategorical;
  f[4].name = "free";
  return Schema(f);
}

std::shared_ptr<const LinearModel> negative_model(std::size_t d) {
  return std::make_shared<const LinearModel>(Vector::Ones(static_cast<Eigen::Index>(d)), -100.0);
}

}  // namespace

TEST(RecourseProblem, RejectsPositiveFactual) {
  auto model = std::make_shared<const LinearModel>(Vector::Ones(2), 0.0);
  EXPECT_THROW(RecourseProblem(model, Vector{{1.0, 1.0}}, oracle::continuous_schema(2)), Error);
  // f = 0.5 exactly is not below theta either.
  EXPECT_THROW(RecourseProblem(model, Vector{{0.0, 0.0}}, oracle::continuous_schema(2)), Error);
  EXPECT_NO_THROW(RecourseProblem(model, Vector{{-1.0, 0.0}}, oracle::continuous_schema(2)));
}

TEST(RecourseProblem, ValidatesInputs) {
  auto model = negative_model(2);
  EXPECT_THROW(RecourseProblem(nullptr, Vector::Zero(2), oracle::continuous_schema(2)), Error);
  EXPECT_THROW(RecourseProblem(model, Vector::Zero(3), oracle::continuous_schema(3)), DimensionError);
  EXPECT_THROW(RecourseProblem(model, Vector::Zero(2), oracle::continuous_schema(3)), DimensionError);
  EXPECT_THROW(RecourseProblem(model, Vector{{NAN, 0.0}}, oracle::continuous_schema(2)), Error);
  EXPECT_THROW(RecourseProblem(model, Vector::Zero(2), oracle::continuous_schema(2), Threshold{}, {0.5, 0.6}),
               Error);
  EXPECT_THROW(Threshold(1.0), Error);
}

TEST(ActionSet, FollowsSchemaRules) {
  const Vector x{{0.3, 0.4, 0.6, 0.0, 1.2}};
  const ActionSet a = ActionSet::from_schema(mixed_schema(), x);
  EXPECT_EQ(a.frozen, (std::vector<bool>{true, false, false, false, false}));
  EXPECT_EQ(a.lower, (Vector{{0.3, 0.4, 0.0, 0.0, 0.0}}));
  EXPECT_EQ(a.upper, (Vector{{0.3, 1.0, 0.6, 1.0, 1.2}}));
  EXPECT_TRUE(a.admits(Vector{{0.3, 0.9, 0.1, 1.0, 1.1}}));
  EXPECT_FALSE(a.admits(Vector{{0.31, 0.9, 0.1, 1.0, 1.1}}));
  EXPECT_FALSE(a.admits(Vector{{0.3, 0.39, 0.1, 1.0, 1.1}}));
}

TEST(ProjectToActions, Examples) {
  const RecourseProblem p(negative_model(5), Vector{{0.3, 0.4, 0.6, 0.0, 0.5}}, mixed_schema());
  EXPECT_EQ(project_to_actions(p, Vector{{0.9, 0.1, 0.9, 0.7, -0.5}}), (Vector{{0.3, 0.4, 0.6, 0.7, 0.0}}));
  EXPECT_EQ(project_to_actions(p, Vector{{0.3, 1.7, 0.2, 1.0, 0.8}}), (Vector{{0.3, 1.0, 0.2, 1.0, 0.8}}));
  // Idempotent.
  const Vector once = project_to_actions(p, Vector{{0.0, 0.0, 1.0, 2.0, 3.0}});
  EXPECT_EQ(project_to_actions(p, once), once);
  EXPECT_THROW(project_to_actions(p, Vector::Zero(4)), DimensionError);
}

TEST(ClampToRange, IgnoresImmutability) {
  const RecourseProblem p(negative_model(5), Vector{{0.3, 0.4, 0.6, 0.0, 0.5}}, mixed_schema());
  EXPECT_EQ(clamp_to_range(p, Vector{{0.9, 0.1, 0.9, 1.7, -0.5}}), (Vector{{0.9, 0.1, 0.9, 1.0, 0.0}}));
}

TEST(RoundBinary, OnlyTouchesBinaryCoordinates) {
  const RecourseProblem p(negative_model(5), Vector{{0.3, 0.4, 0.6, 0.0, 0.5}}, mixed_schema());
  EXPECT_EQ(round_binary(p, Vector{{0.3, 0.45, 0.6, 0.5, 0.49}}), (Vector{{0.3, 0.45, 0.6, 1.0, 0.49}}));
  EXPECT_EQ(round_binary(p, Vector{{0.3, 0.45, 0.6, 0.4999, 0.49}})[3], 0.0);
}

TEST(Finalize, SuccessRequiresStrictCrossing) {
  auto model = std::make_shared<const LinearModel>(Vector::Ones(1), -0.5);
  const RecourseProblem p(model, Vector{{0.2}}, oracle::continuous_schema(1));
  const auto at_boundary = finalize(p, Vector{{0.5}}, "m", 3);
  EXPECT_FALSE(at_boundary.success());
  EXPECT_EQ(at_boundary.failure_reason, kBudgetExhausted);
  EXPECT_FALSE(at_boundary.counterfactual.has_value());
  const auto over = finalize(p, Vector{{0.6}}, "m", 4);
  ASSERT_TRUE(over.success());
  EXPECT_NEAR(over.delta[0], 0.4, 1e-15);
  EXPECT_EQ(over.iterations, 4);
  EXPECT_EQ(over.method_name, "m");
  EXPECT_FALSE(finalize(p, std::nullopt, "m", 0, kNoValidatedAction).success());
  EXPECT_FALSE(finalize(p, Vector{{NAN}}, "m", 0).success());
  EXPECT_FALSE(finalize(p, Vector::Ones(2), "m", 0).success());
}

TEST(LatentProblem, BoxAroundEncodedFactual) {
  std::mt19937_64 rng(1);
  const auto vae = oracle::random_vae(2, 3, 6, rng);
  const RecourseProblem p(negative_model(2), Vector{{0.2, 0.7}}, oracle::continuous_schema(2));
  const LatentProblem lp(p, vae, 1.5);
  EXPECT_EQ(lp.initial_latent(), vae->encode(p.factual()));
  EXPECT_TRUE(lp.contains(lp.initial_latent()));
  const Vector far = lp.initial_latent().array() + 10.0;
  EXPECT_FALSE(lp.contains(far));
  const Vector clamped = lp.clamp_latent(far);
  EXPECT_TRUE(lp.contains(clamped));
  EXPECT_NEAR((clamped - lp.initial_latent()).maxCoeff(), 1.5, 1e-12);
  EXPECT_THROW(LatentProblem(p, nullptr), Error);
  EXPECT_THROW(LatentProblem(p, vae, 0.0), Error);
  EXPECT_THROW(LatentProblem(RecourseProblem(negative_model(3), Vector::Zero(3), oracle::continuous_schema(3)), vae),
               DimensionError);
}

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "recourse/lime.hpp"

using namespace recourse;

TEST(Lime, RecoversLinearModelDirection) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    Vector w(5), x(5);
    for (int j = 0; j < 5; ++j) {
      w[j] = u(rng);
      x[j] = 0.5 + 0.2 * u(rng);
    }
    const LinearModel model(w, -w.dot(x) + 0.3 * u(rng));
    LimeConfig cfg;
    cfg.n_samples = 2000;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto local = lime_fit(model, x, cfg);
    const double cosine = local.coefficients.dot(w) / (local.coefficients.norm() * w.norm());
    EXPECT_GT(cosine, 0.99) << "trial " << t;
    EXPECT_EQ(local.anchor, x);
    EXPECT_GT(local.r_squared, 0.9);
  }
}

TEST(Lime, ExactOnAffineRegion) {
  // Near the centre of the sigmoid, f is almost affine; the surrogate's value at
  // the anchor should match f closely.
  const LinearModel model(Vector{{0.3, -0.2}}, 0.0);
  const Vector x{{0.1, 0.1}};
  const auto local = lime_fit(model, x);
  EXPECT_NEAR(local.score(x), model.predict_proba(x), 1e-3);
}

TEST(Lime, TooFewSamplesIsConfigError) {
  const LinearModel model(Vector::Ones(4), 0.0);
  LimeConfig cfg;
  cfg.n_samples = 5;
  EXPECT_THROW(lime_fit(model, Vector::Zero(4), cfg), ConfigError);
  cfg.n_samples = 6;
  EXPECT_NO_THROW(lime_fit(model, Vector::Zero(4), cfg));
}

TEST(Lime, ScaleDimensionIsChecked) {
  const LinearModel model(Vector::Ones(3), 0.0);
  LimeConfig cfg;
  cfg.perturbation_scale = Vector::Constant(2, 0.1);
  EXPECT_THROW(lime_fit(model, Vector::Zero(3), cfg), DimensionError);
}

TEST(Lime, DeterministicForSeed) {
  std::mt19937_64 rng(5);
  const auto mlp = oracle::random_mlp(4, rng);
  const Vector x = Vector::Constant(4, 0.4);
  LimeConfig cfg;
  cfg.binary_mask = {false, true, false, false};
  const auto a = lime_fit(*mlp, x, cfg);
  const auto b = lime_fit(*mlp, x, cfg);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_EQ(a.intercept, b.intercept);
  cfg.seed = 1;
  EXPECT_NE(lime_fit(*mlp, x, cfg).coefficients, a.coefficients);
}

TEST(Lime, ConstantModelFallsBackToRidge) {
  // A model whose output never varies gives a singular system only when all
  // samples coincide; zero-width perturbations force that.
  const LinearModel model(Vector::Zero(2), 0.0);
  LimeConfig cfg;
  cfg.perturbation_scale = Vector::Zero(2);
  const auto local = lime_fit(model, Vector{{0.5, 0.5}}, cfg);
  EXPECT_TRUE(local.ridge_fallback);
  EXPECT_TRUE(local.coefficients.allFinite());
  EXPECT_NEAR(local.score(Vector{{0.5, 0.5}}), 0.5, 1e-6);
}

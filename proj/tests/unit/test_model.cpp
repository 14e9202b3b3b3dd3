#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "recourse/model.hpp"

namespace fs = std::filesystem;
using namespace recourse;

namespace {

double sigmoid_oracle(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Two well separated Gaussian blobs in 2-D.
std::pair<Matrix, std::vector<int>> blobs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  Matrix x(static_cast<Eigen::Index>(n), 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    const double c = y[i] ? 0.75 : 0.25;
    x(static_cast<Eigen::Index>(i), 0) = c + noise(rng);
    x(static_cast<Eigen::Index>(i), 1) = c + noise(rng);
  }
  return {x, y};
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST(Classifier, LinearProbabilityMatchesSigmoidOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    Vector w(4), x(4);
    for (int j = 0; j < 4; ++j) {
      w[j] = u(rng);
      x[j] = u(rng);
    }
    const double b = u(rng);
    const LinearModel m(w, b);
    EXPECT_NEAR(m.predict_proba(x), sigmoid_oracle(w.dot(x) + b), 1e-12);
    EXPECT_NEAR(m.logit(x), w.dot(x) + b, 1e-12);
  }
}

TEST(Classifier, ProbabilityStaysInOpenIntervalForExtremeLogits) {
  const LinearModel m(Vector::Constant(1, 1.0), 0.0);
  EXPECT_GT(m.predict_proba(Vector(Vector::Constant(1, -800.0))), -1e-300);
  EXPECT_LE(m.predict_proba(Vector(Vector::Constant(1, 800.0))), 1.0);
  EXPECT_TRUE(std::isfinite(m.predict_proba(Vector(Vector::Constant(1, -800.0)))));
}

TEST(Classifier, BatchMatchesSingle) {
  std::mt19937_64 rng(2);
  const auto mlp = oracle::random_mlp(5, rng);
  Matrix rows = Matrix::Random(7, 5);
  const Vector batch = mlp->predict_proba(rows);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    EXPECT_DOUBLE_EQ(batch[i], mlp->predict_proba(Vector(rows.row(i).transpose())));
  }
}

TEST(Classifier, LabelUsesStrictThreshold) {
  const LinearModel m(Vector::Constant(1, 1.0), 0.0);
  EXPECT_EQ(m.predict_label(Vector::Zero(1)), 0);
  EXPECT_EQ(m.predict_label(Vector::Constant(1, 1e-9)), 1);
  EXPECT_EQ(m.predict_label(Vector::Constant(1, 1.0), Threshold(0.9)), 0);
}

TEST(Classifier, DimensionMismatchThrows) {
  const LinearModel m(Vector::Constant(3, 1.0), 0.0);
  EXPECT_THROW(m.predict_proba(Vector(Vector::Zero(2))), DimensionError);
}

TEST(Classifier, MlpRequiresFixedArchitecture) {
  std::mt19937_64 rng(3);
  std::vector<DenseLayer> layers{oracle::random_layer(2, 18, 1.0, rng), oracle::random_layer(18, 9, 1.0, rng),
                                 oracle::random_layer(9, 1, 1.0, rng)};
  EXPECT_THROW(MlpModel{layers}, Error);
}

TEST(Classifier, GradientsMatchFiniteDifferences) {
  const auto outcome = oracle::classifier_gradients(11, 60);
  EXPECT_TRUE(outcome.pass) << outcome.detail;
}

TEST(Training, SeparableBlobsReachHighAccuracy) {
  const auto [x, y] = blobs(400, 5);
  for (Architecture arch : {Architecture::Linear, Architecture::Mlp}) {
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.01;
    const auto result = train(arch, x, y, cfg);
    EXPECT_GE(accuracy(*result.model, x, y), 0.99) << to_string(arch);
    ASSERT_EQ(result.epoch_loss.size(), 200u);
    EXPECT_LT(result.epoch_loss.back(), result.epoch_loss.front());
  }
}

TEST(Training, DeterministicForSeed) {
  const auto [x, y] = blobs(100, 6);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  const auto a = train(Architecture::Mlp, x, y, cfg);
  const auto b = train(Architecture::Mlp, x, y, cfg);
  EXPECT_EQ(a.model->checksum(), b.model->checksum());
  cfg.seed = 1;
  const auto c = train(Architecture::Mlp, x, y, cfg);
  EXPECT_NE(a.model->checksum(), c.model->checksum());
}

TEST(Training, RejectsBadConfig) {
  const auto [x, y] = blobs(10, 7);
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train(Architecture::Linear, x, y, cfg), Error);
  cfg = TrainConfig{};
  cfg.learning_rate = -1.0;
  EXPECT_THROW(train(Architecture::Linear, x, y, cfg), Error);
  EXPECT_THROW(train(Architecture::Linear, x, std::vector<int>(3, 0), TrainConfig{}), Error);
}

TEST(Training, NonFiniteLossRaisesTrainingError) {
  auto [x, y] = blobs(10, 8);
  x(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(train(Architecture::Linear, x, y, TrainConfig{}), TrainingError);
}

TEST(Persistence, RoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  const auto mlp = oracle::random_mlp(6, rng);
  MinMaxScaler scaler({{0.0, 10.0, true}, {0.0, 1.0, false}, {1.0, 2.0, true}, {-1.0, 1.0, true},
                       {0.0, 1.0, false}, {5.0, 6.0, true}});
  const fs::path p = temp_file("recourse_mlp.json");
  save_weights(*mlp, p, {{"a", "b", "c", "d", "e", "f"}, scaler});
  const auto loaded = load_weights(p, Architecture::Mlp);
  EXPECT_EQ(loaded.model->checksum(), mlp->checksum());
  EXPECT_EQ(loaded.metadata.feature_names.size(), 6u);
  ASSERT_TRUE(loaded.metadata.scaling.has_value());
  EXPECT_EQ(loaded.metadata.scaling->params()[2].raw_min, 1.0);
  const Vector x = Vector::LinSpaced(6, 0.0, 1.0);
  EXPECT_EQ(loaded.model->predict_proba(x), mlp->predict_proba(x));
  EXPECT_EQ(serialize_weights(*loaded.model, loaded.metadata), serialize_weights(*mlp, {{"a", "b", "c", "d", "e", "f"}, scaler}));
}

TEST(Persistence, TruncatedFileIsFormatError) {
  const LinearModel m(Vector::LinSpaced(4, -1.0, 1.0), 0.5);
  const std::string text = serialize_weights(m);
  const fs::path p = temp_file("recourse_truncated.json");
  std::ofstream(p) << text.substr(0, text.size() / 2);
  EXPECT_THROW(load_weights(p), FormatError);
  EXPECT_THROW(load_weights(temp_file("recourse_does_not_exist.json")), FormatError);
}

TEST(Persistence, ArchitectureMismatchIsFormatError) {
  const LinearModel m(Vector::LinSpaced(4, -1.0, 1.0), 0.5);
  const fs::path p = temp_file("recourse_linear.json");
  save_weights(m, p);
  EXPECT_THROW(load_weights(p, Architecture::Mlp), FormatError);
  EXPECT_NO_THROW(load_weights(p, Architecture::Linear));
}

TEST(Persistence, InconsistentDimsAreFormatError) {
  std::string text = serialize_weights(LinearModel(Vector::Constant(2, 1.0), 0.0));
  const auto pos = text.find("\"in\": 2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 7, "\"in\": 3");
  EXPECT_THROW(parse_weights(text), FormatError);
  EXPECT_THROW(parse_weights(R"({"format": "other", "version": 1})"), FormatError);
}

TEST(Persistence, GoldenLinearFile) {
  const auto loaded = load_weights(fs::path(RECOURSE_TEST_DATA_DIR) / "golden_linear.json", Architecture::Linear);
  const auto& m = dynamic_cast<const LinearModel&>(*loaded.model);
  EXPECT_EQ(m.weights(), (Vector(3) << 0.5, -1.25, 2.0).finished());
  EXPECT_EQ(m.bias(), 0.25);
  EXPECT_NEAR(m.predict_proba(Vector(Vector::Ones(3))), 0.8175744761936437, 1e-15);
  EXPECT_EQ(loaded.metadata.feature_names, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Checksum, DiffersWhenAWeightChanges) {
  const LinearModel a(Vector::Constant(3, 1.0), 0.0);
  Vector w = Vector::Constant(3, 1.0);
  w[1] = std::nextafter(1.0, 2.0);
  const LinearModel b(w, 0.0);
  EXPECT_NE(a.checksum(), b.checksum());
  EXPECT_EQ(a.checksum(), LinearModel(Vector::Constant(3, 1.0), 0.0).checksum());
}

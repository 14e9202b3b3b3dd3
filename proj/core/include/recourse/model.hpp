#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/types.hpp"

namespace recourse {

enum class Architecture { Linear, Mlp };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view text);

// Fully connected layer; weights are (out x in).
struct DenseLayer {
  Matrix weights;
  Vector bias;
};

// Fixed differentiable binary classifier f: R^d -> (0,1). Hidden layers use
// ReLU, the single output unit a sigmoid. Instances are immutable.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Architecture arch() const noexcept = 0;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(layers_.front().weights.cols()); }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  double logit(const Vector& x) const;
  double predict_proba(const Vector& x) const;
  // Row-wise probabilities for a batch.
  Vector predict_proba(const Matrix& rows) const;
  // 1 iff f(x) > theta.
  int predict_label(const Vector& x, Threshold theta = Threshold{}) const;

  // d logit / dx. The ReLU subgradient at 0 is taken as 0.
  Vector logit_gradient(const Vector& x) const;
  // df/dx = f (1 - f) d logit / dx.
  Vector input_gradient(const Vector& x) const;

  // FNV-1a over the raw weight bytes; used to check models are never mutated.
  std::uint64_t checksum() const;

 protected:
  explicit Classifier(std::vector<DenseLayer> layers);

 private:
  std::vector<DenseLayer> layers_;
};

class LinearModel final : public Classifier {
 public:
  LinearModel(const Vector& weights, double bias);
  explicit LinearModel(DenseLayer layer);

  Architecture arch() const noexcept override { return Architecture::Linear; }
  Vector weights() const { return layers().front().weights.row(0).transpose(); }
  double bias() const { return layers().front().bias[0]; }
};

class MlpModel final : public Classifier {
 public:
  static constexpr std::array<int, 3> kHiddenSizes{18, 9, 3};

  // Expects exactly four layers: d->18->9->3->1.
  explicit MlpModel(std::vector<DenseLayer> layers);

  Architecture arch() const noexcept override { return Architecture::Mlp; }
};

struct TrainConfig {
  double learning_rate = 0.002;
  int epochs = 10;
  int batch_size = 1024;
  std::uint64_t seed = 0;
  // RMSProp moving-average decay and denominator epsilon.
  double rho = 0.9;
  double epsilon = 1e-8;

  void validate() const;
};

struct TrainResult {
  std::shared_ptr<const Classifier> model;
  // Mean binary cross-entropy per epoch.
  std::vector<double> epoch_loss;
};

// Minimizes binary cross-entropy with mini-batch RMSProp. Deterministic given
// the seed. Throws TrainingError on a non-finite loss.
TrainResult train(Architecture arch, const Matrix& inputs, const std::vector<int>& labels,
                  const TrainConfig& cfg);
TrainResult train(Architecture arch, const EncodedDataset& data, const TrainConfig& cfg);

double accuracy(const Classifier& model, const Matrix& inputs, const std::vector<int>& labels,
                Threshold theta = Threshold{});

// --- Persistence ------------------------------------------------------------

// Optional context stored next to the weights.
struct WeightMetadata {
  std::vector<std::string> feature_names;
  std::optional<MinMaxScaler> scaling;
};

struct LoadedClassifier {
  std::shared_ptr<const Classifier> model;
  WeightMetadata metadata;
};

std::string serialize_weights(const Classifier& model, const WeightMetadata& meta = {});
LoadedClassifier parse_weights(std::string_view text);

void save_weights(const Classifier& model, const std::filesystem::path& path,
                  const WeightMetadata& meta = {});
LoadedClassifier load_weights(const std::filesystem::path& path);
// Throws FormatError when the file holds a different architecture.
LoadedClassifier load_weights(const std::filesystem::path& path, Architecture expected);

}  // namespace recourse

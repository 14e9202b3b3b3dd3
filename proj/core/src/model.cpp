#include "recourse/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "json_io.hpp"
#include "math.hpp"
#include "optim.hpp"

namespace recourse {

std::string_view to_string(Architecture arch) {
  return arch == Architecture::Linear ? "linear" : "mlp";
}

Architecture parse_architecture(std::string_view text) {
  if (text == "linear" || text == "lr" || text == "logistic") return Architecture::Linear;
  if (text == "mlp" || text == "ann") return Architecture::Mlp;
  throw ConfigError(fmt::format("unknown model architecture '{}'", text));
}

// --- Classifier -------------------------------------------------------------

Classifier::Classifier(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error("classifier needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.weights.rows()) throw Error("bias/weight shape mismatch");
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows()) {
      throw Error("consecutive layer dims do not chain");
    }
  }
  if (layers_.back().weights.rows() != 1) throw Error("output layer must have one unit");
}

double Classifier::logit(const Vector& x) const {
  check_dim(input_dim(), static_cast<std::size_t>(x.size()));
  Vector a = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    a = (layers_[l].weights * a + layers_[l].bias).cwiseMax(0.0);
  }
  return layers_.back().weights.row(0).dot(a) + layers_.back().bias[0];
}

double Classifier::predict_proba(const Vector& x) const { return detail::sigmoid(logit(x)); }

Vector Classifier::predict_proba(const Matrix& rows) const {
  check_dim(input_dim(), static_cast<std::size_t>(rows.cols()));
  Matrix a = rows;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Matrix z = a * layers_[l].weights.transpose();
    z.rowwise() += layers_[l].bias.transpose();
    a = z.cwiseMax(0.0);
  }
  Vector z = a * layers_.back().weights.row(0).transpose();
  z.array() += layers_.back().bias[0];
  return z.unaryExpr([](double v) { return detail::sigmoid(v); });
}

int Classifier::predict_label(const Vector& x, Threshold theta) const {
  return theta.accepts(predict_proba(x)) ? 1 : 0;
}

Vector Classifier::logit_gradient(const Vector& x) const {
  check_dim(input_dim(), static_cast<std::size_t>(x.size()));
  std::vector<Vector> pre;
  pre.reserve(layers_.size());
  Vector a = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    pre.push_back(layers_[l].weights * a + layers_[l].bias);
    a = pre.back().cwiseMax(0.0);
  }
  Vector g = layers_.back().weights.row(0).transpose();
  for (std::size_t l = layers_.size() - 1; l-- > 0;) {
    g = (pre[l].array() > 0.0).select(g, 0.0);
    g = layers_[l].weights.transpose() * g;
  }
  return g;
}

Vector Classifier::input_gradient(const Vector& x) const {
  const double f = predict_proba(x);
  return f * (1.0 - f) * logit_gradient(x);
}

std::uint64_t Classifier::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const double* p, Eigen::Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& layer : layers_) {
    mix(layer.weights.data(), layer.weights.size());
    mix(layer.bias.data(), layer.bias.size());
  }
  return h;
}

namespace {

DenseLayer linear_layer(const Vector& w, double b) {
  DenseLayer layer{Matrix(1, w.size()), Vector::Constant(1, b)};
  layer.weights.row(0) = w.transpose();
  return layer;
}

std::vector<DenseLayer> checked_mlp(std::vector<DenseLayer> layers) {
  if (layers.size() != MlpModel::kHiddenSizes.size() + 1) {
    throw Error("mlp must have three hidden layers");
  }
  for (std::size_t l = 0; l < MlpModel::kHiddenSizes.size(); ++l) {
    if (layers[l].weights.rows() != MlpModel::kHiddenSizes[l]) {
      throw Error("mlp hidden layers must be sized 18, 9, 3");
    }
  }
  return layers;
}

}  // namespace

LinearModel::LinearModel(const Vector& weights, double bias)
    : Classifier({linear_layer(weights, bias)}) {}

LinearModel::LinearModel(DenseLayer layer) : Classifier({std::move(layer)}) {}

MlpModel::MlpModel(std::vector<DenseLayer> layers) : Classifier(checked_mlp(std::move(layers))) {}

// --- Training ---------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

namespace {

std::vector<DenseLayer> init_layers(const std::vector<int>& dims, std::mt19937_64& rng) {
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double limit = std::sqrt(6.0 / dims[l]);
    std::uniform_real_distribution<double> u(-limit, limit);
    DenseLayer layer{Matrix(dims[l + 1], dims[l]), Vector::Zero(dims[l + 1])};
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = u(rng);
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

TrainResult train(Architecture arch, const Matrix& inputs, const std::vector<int>& labels,
                  const TrainConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(inputs.rows());
  if (n == 0) throw Error("cannot train on empty data");
  check_dim(n, labels.size());
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error("labels must be 0 or 1");
  }

  std::vector<int> dims{static_cast<int>(inputs.cols())};
  if (arch == Architecture::Mlp) dims.insert(dims.end(), MlpModel::kHiddenSizes.begin(), MlpModel::kHiddenSizes.end());
  dims.push_back(1);

  std::mt19937_64 rng(cfg.seed);
  auto layers = init_layers(dims, rng);
  std::vector<std::size_t> sizes;
  for (const auto& layer : layers) {
    sizes.push_back(static_cast<std::size_t>(layer.weights.size()));
    sizes.push_back(static_cast<std::size_t>(layer.bias.size()));
  }
  detail::RmsProp opt(cfg.learning_rate, cfg.rho, cfg.epsilon, sizes);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t L = layers.size();
  std::vector<Matrix> acts(L + 1);
  std::vector<Matrix> pre(L);

  TrainResult result;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const auto B = static_cast<Eigen::Index>(end - start);
      Matrix& x = acts[0];
      x.resize(B, inputs.cols());
      Vector y(B);
      for (Eigen::Index r = 0; r < B; ++r) {
        const auto src = static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]);
        x.row(r) = inputs.row(src);
        y[r] = labels[static_cast<std::size_t>(src)];
      }
      for (std::size_t l = 0; l < L; ++l) {
        pre[l] = acts[l] * layers[l].weights.transpose();
        pre[l].rowwise() += layers[l].bias.transpose();
        acts[l + 1] = (l + 1 < L) ? Matrix(pre[l].cwiseMax(0.0)) : pre[l];
      }
      // Output logits live in pre[L-1] (B x 1).
      Matrix delta(B, 1);
      for (Eigen::Index r = 0; r < B; ++r) {
        const double z = pre[L - 1](r, 0);
        loss_sum += detail::softplus(z) - y[r] * z;
        delta(r, 0) = (detail::sigmoid(z) - y[r]) / static_cast<double>(B);
      }
      for (std::size_t l = L; l-- > 0;) {
        Matrix grad_w = delta.transpose() * acts[l];
        Vector grad_b = delta.colwise().sum().transpose();
        if (l > 0) {
          Matrix back = delta * layers[l].weights;
          delta = (pre[l - 1].array() > 0.0).select(back, 0.0);
        }
        opt.step(2 * l, layers[l].weights.data(), grad_w.data());
        opt.step(2 * l + 1, layers[l].bias.data(), grad_b.data());
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) throw TrainingError("non-finite training loss", epoch);
    result.epoch_loss.push_back(epoch_loss);
  }

  if (arch == Architecture::Linear) {
    result.model = std::make_shared<const LinearModel>(std::move(layers.front()));
  } else {
    result.model = std::make_shared<const MlpModel>(std::move(layers));
  }
  return result;
}

TrainResult train(Architecture arch, const EncodedDataset& data, const TrainConfig& cfg) {
  return train(arch, data.matrix(), data.target(), cfg);
}

double accuracy(const Classifier& model, const Matrix& inputs, const std::vector<int>& labels,
                Threshold theta) {
  check_dim(static_cast<std::size_t>(inputs.rows()), labels.size());
  if (labels.empty()) return 0.0;
  Vector p = model.predict_proba(inputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += (theta.accepts(p[static_cast<Eigen::Index>(i)]) ? 1 : 0) == labels[i] ? 1U : 0U;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

// --- Persistence --------------------------------------------------------------

std::string serialize_weights(const Classifier& model, const WeightMetadata& meta) {
  using detail::json;
  json doc;
  doc["format"] = detail::kWeightFormat;
  doc["version"] = detail::kWeightVersion;
  doc["arch"] = std::string(to_string(model.arch()));
  json dims = json::array({model.input_dim()});
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    dims.push_back(layer.weights.rows());
    layers.push_back(detail::layer_to_json(layer));
  }
  doc["layer_dims"] = dims;
  doc["layers"] = layers;
  doc["features"] = meta.feature_names;
  doc["scaling"] = meta.scaling ? detail::scaler_to_json(*meta.scaling) : json(nullptr);
  return doc.dump(1) + "\n";
}

LoadedClassifier parse_weights(std::string_view text) {
  using detail::json;
  json doc = detail::parse_document(text);
  LoadedClassifier out;
  try {
    const std::string arch_name = doc.at("arch").get<std::string>();
    if (arch_name != "linear" && arch_name != "mlp") {
      throw FormatError("weight file holds arch '" + arch_name + "', not a classifier");
    }
    std::vector<DenseLayer> layers;
    for (const auto& j : doc.at("layers")) layers.push_back(detail::layer_from_json(j));
    const auto dims = doc.at("layer_dims").get<std::vector<Eigen::Index>>();
    if (dims.size() != layers.size() + 1) throw FormatError("layer_dims does not match layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (layers[l].weights.cols() != dims[l] || layers[l].weights.rows() != dims[l + 1]) {
        throw FormatError("layer_dims does not match layer shapes");
      }
    }
    if (arch_name == "linear") {
      if (layers.size() != 1) throw FormatError("linear model must have one layer");
      out.model = std::make_shared<const LinearModel>(std::move(layers.front()));
    } else {
      out.model = std::make_shared<const MlpModel>(std::move(layers));
    }
    out.metadata.feature_names = doc.value("features", std::vector<std::string>{});
    if (doc.contains("scaling") && !doc["scaling"].is_null()) {
      out.metadata.scaling = detail::scaler_from_json(doc["scaling"]);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed weight file: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid weights: ") + e.what());
  }
  return out;
}

void save_weights(const Classifier& model, const std::filesystem::path& path,
                  const WeightMetadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_weights(model, meta);
}

LoadedClassifier load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str());
}

LoadedClassifier load_weights(const std::filesystem::path& path, Architecture expected) {
  auto loaded = load_weights(path);
  if (loaded.model->arch() != expected) {
    throw FormatError(fmt::format("weight file holds a {} model, expected {}",
                                  to_string(loaded.model->arch()), to_string(expected)));
  }
  return loaded;
}

}  // namespace recourse

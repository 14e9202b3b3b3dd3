#include "recourse/vae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "json_io.hpp"
#include "math.hpp"
#include "optim.hpp"

namespace recourse {

namespace {

void check_layer(const DenseLayer& layer, const char* name) {
  if (layer.bias.size() != layer.weights.rows()) {
    throw Error(std::string("vae layer ") + name + ": bias/weight shape mismatch");
  }
}

Vector tanh_layer(const DenseLayer& layer, const Vector& x) {
  return (layer.weights * x + layer.bias).array().tanh().matrix();
}

}  // namespace

Vae::Vae(DenseLayer encoder_hidden, DenseLayer encoder_mean, DenseLayer encoder_logvar,
         DenseLayer decoder_hidden, DenseLayer decoder_output, std::vector<bool> binary_mask)
    : enc_hidden_(std::move(encoder_hidden)),
      enc_mean_(std::move(encoder_mean)),
      enc_logvar_(std::move(encoder_logvar)),
      dec_hidden_(std::move(decoder_hidden)),
      dec_out_(std::move(decoder_output)),
      binary_mask_(std::move(binary_mask)) {
  check_layer(enc_hidden_, "encoder_hidden");
  check_layer(enc_mean_, "encoder_mean");
  check_layer(enc_logvar_, "encoder_logvar");
  check_layer(dec_hidden_, "decoder_hidden");
  check_layer(dec_out_, "decoder_output");
  const auto d = enc_hidden_.weights.cols();
  const auto h = enc_hidden_.weights.rows();
  const auto k = enc_mean_.weights.rows();
  if (enc_mean_.weights.cols() != h || enc_logvar_.weights.cols() != h ||
      enc_logvar_.weights.rows() != k || dec_hidden_.weights.cols() != k ||
      dec_out_.weights.cols() != dec_hidden_.weights.rows() || dec_out_.weights.rows() != d) {
    throw Error("vae layer dims do not chain");
  }
  if (binary_mask_.size() != static_cast<std::size_t>(d)) throw DimensionError(d, binary_mask_.size());
}

Vector Vae::encode(const Vector& x) const {
  check_dim(input_dim(), static_cast<std::size_t>(x.size()));
  return enc_mean_.weights * tanh_layer(enc_hidden_, x) + enc_mean_.bias;
}

std::pair<Vector, Vector> Vae::encode_distribution(const Vector& x) const {
  check_dim(input_dim(), static_cast<std::size_t>(x.size()));
  const Vector h = tanh_layer(enc_hidden_, x);
  return {enc_mean_.weights * h + enc_mean_.bias, enc_logvar_.weights * h + enc_logvar_.bias};
}

Vector Vae::decode(const Vector& z) const {
  check_dim(latent_dim(), static_cast<std::size_t>(z.size()));
  const Vector pre = dec_out_.weights * tanh_layer(dec_hidden_, z) + dec_out_.bias;
  return pre.unaryExpr([](double v) { return detail::sigmoid(v); });
}

Vector Vae::decode_vjp(const Vector& z, const Vector& v) const {
  check_dim(latent_dim(), static_cast<std::size_t>(z.size()));
  check_dim(input_dim(), static_cast<std::size_t>(v.size()));
  const Vector h = tanh_layer(dec_hidden_, z);
  const Vector out = (dec_out_.weights * h + dec_out_.bias).unaryExpr([](double a) { return detail::sigmoid(a); });
  const Vector g_out = v.array() * out.array() * (1.0 - out.array());
  const Vector g_h = (dec_out_.weights.transpose() * g_out).array() * (1.0 - h.array().square());
  return dec_hidden_.weights.transpose() * g_h;
}

Vector Vae::encode_vjp(const Vector& x, const Vector& v) const {
  check_dim(input_dim(), static_cast<std::size_t>(x.size()));
  check_dim(latent_dim(), static_cast<std::size_t>(v.size()));
  const Vector h = tanh_layer(enc_hidden_, x);
  const Vector g_h = (enc_mean_.weights.transpose() * v).array() * (1.0 - h.array().square());
  return enc_hidden_.weights.transpose() * g_h;
}

std::uint64_t Vae::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const double* p, Eigen::Index n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const DenseLayer* layer : {&enc_hidden_, &enc_mean_, &enc_logvar_, &dec_hidden_, &dec_out_}) {
    mix(layer->weights.data(), layer->weights.size());
    mix(layer->bias.data(), layer->bias.size());
  }
  return h;
}

// --- Training -------------------------------------------------------------------

void VaeTrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("vae learning_rate must be > 0");
  if (epochs < 1) throw ConfigError("vae epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("vae batch_size must be >= 1");
  if (min_steps < 0) throw ConfigError("vae min_steps must be >= 0");
  if (!(kl_weight >= 0.0)) throw ConfigError("vae kl_weight must be >= 0");
  if (hidden < 0) throw ConfigError("vae hidden must be >= 0");
}

std::size_t default_latent_dim(std::size_t d) {
  return std::clamp<std::size_t>(d, 2, 8);
}

namespace {

DenseLayer glorot(Eigen::Index in, Eigen::Index out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
  for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = u(rng);
  return layer;
}

Matrix affine(const Matrix& x, const DenseLayer& layer) {
  Matrix z = x * layer.weights.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

}  // namespace

VaeTrainResult train_vae(const Matrix& data, const std::vector<bool>& binary_mask,
                         std::size_t latent_dim, const VaeTrainConfig& cfg) {
  cfg.validate();
  if (latent_dim < 1) throw ConfigError("latent dim must be >= 1");
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d = data.cols();
  if (n == 0) throw Error("cannot train a vae on empty data");
  check_dim(static_cast<std::size_t>(d), binary_mask.size());
  const auto k = static_cast<Eigen::Index>(latent_dim);
  const Eigen::Index hidden = cfg.hidden > 0 ? cfg.hidden : std::max<Eigen::Index>(8, 2 * d);

  std::mt19937_64 rng(cfg.seed);
  std::vector<DenseLayer> layers;
  layers.push_back(glorot(d, hidden, rng));       // encoder hidden
  layers.push_back(glorot(hidden, k, rng));       // mean
  layers.push_back(glorot(hidden, k, rng));       // log variance
  layers.push_back(glorot(k, hidden, rng));       // decoder hidden
  layers.push_back(glorot(hidden, d, rng));       // decoder output
  std::vector<std::size_t> sizes;
  for (const auto& layer : layers) {
    sizes.push_back(static_cast<std::size_t>(layer.weights.size()));
    sizes.push_back(static_cast<std::size_t>(layer.bias.size()));
  }
  detail::Adam opt(cfg.learning_rate, sizes);
  Eigen::Array<bool, 1, Eigen::Dynamic> is_binary(d);
  for (Eigen::Index j = 0; j < d; ++j) is_binary[j] = binary_mask[static_cast<std::size_t>(j)];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::normal_distribution<double> normal(0.0, 1.0);
  VaeTrainResult result;

  const auto batches = static_cast<int>((n + static_cast<std::size_t>(cfg.batch_size) - 1) /
                                       static_cast<std::size_t>(cfg.batch_size));
  const int epochs = std::max(cfg.epochs, (cfg.min_steps + batches - 1) / batches);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const auto B = static_cast<Eigen::Index>(end - start);
      Matrix x(B, d);
      for (Eigen::Index r = 0; r < B; ++r) {
        x.row(r) = data.row(static_cast<Eigen::Index>(order[start + static_cast<std::size_t>(r)]));
      }
      Matrix eps(B, k);
      for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = normal(rng);

      const Matrix h = affine(x, layers[0]).array().tanh().matrix();
      const Matrix mu = affine(h, layers[1]);
      const Matrix logvar = affine(h, layers[2]);
      const Matrix sd = (0.5 * logvar.array()).exp().matrix();
      const Matrix z = mu + Matrix(sd.array() * eps.array());
      const Matrix hd = affine(z, layers[3]).array().tanh().matrix();
      const Matrix logits = affine(hd, layers[4]);

      Matrix g_logits(B, d);
      for (Eigen::Index r = 0; r < B; ++r) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const double a = logits(r, j);
          const double t = x(r, j);
          const double o = detail::sigmoid(a);
          if (is_binary[j]) {
            loss_sum += detail::softplus(a) - t * a;
            g_logits(r, j) = o - t;
          } else {
            loss_sum += (o - t) * (o - t);
            g_logits(r, j) = 2.0 * (o - t) * o * (1.0 - o);
          }
        }
        for (Eigen::Index c = 0; c < k; ++c) {
          const double lv = logvar(r, c);
          loss_sum += cfg.kl_weight * -0.5 * (1.0 + lv - mu(r, c) * mu(r, c) - std::exp(lv));
        }
      }
      const double inv_b = 1.0 / static_cast<double>(B);
      g_logits *= inv_b;

      std::vector<Matrix> gw(5);
      std::vector<Vector> gb(5);
      gw[4] = g_logits.transpose() * hd;
      gb[4] = g_logits.colwise().sum().transpose();
      const Matrix g_pre_d = (g_logits * layers[4].weights).array() * (1.0 - hd.array().square());
      gw[3] = g_pre_d.transpose() * z;
      gb[3] = g_pre_d.colwise().sum().transpose();
      const Matrix g_z = g_pre_d * layers[3].weights;
      const Matrix g_mu = g_z + cfg.kl_weight * inv_b * mu;
      const Matrix g_logvar = Matrix(g_z.array() * eps.array() * 0.5 * sd.array()) +
                              Matrix(cfg.kl_weight * inv_b * 0.5 * (logvar.array().exp() - 1.0));
      gw[1] = g_mu.transpose() * h;
      gb[1] = g_mu.colwise().sum().transpose();
      gw[2] = g_logvar.transpose() * h;
      gb[2] = g_logvar.colwise().sum().transpose();
      const Matrix g_pre_e = (g_mu * layers[1].weights + g_logvar * layers[2].weights).array() *
                             (1.0 - h.array().square());
      gw[0] = g_pre_e.transpose() * x;
      gb[0] = g_pre_e.colwise().sum().transpose();

      opt.tick();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        opt.step(2 * l, layers[l].weights.data(), gw[l].data());
        opt.step(2 * l + 1, layers[l].bias.data(), gb[l].data());
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(epoch_loss)) throw TrainingError("non-finite vae loss", epoch);
    result.epoch_loss.push_back(epoch_loss);
  }
  result.vae = std::make_shared<const Vae>(std::move(layers[0]), std::move(layers[1]), std::move(layers[2]),
                                           std::move(layers[3]), std::move(layers[4]), binary_mask);
  return result;
}

VaeTrainResult train_vae(const EncodedDataset& data, std::size_t latent_dim, const VaeTrainConfig& cfg) {
  return train_vae(data.matrix(), data.schema().binary_mask(), latent_dim, cfg);
}

// --- Persistence ------------------------------------------------------------------

std::string serialize_vae(const Vae& vae) {
  using detail::json;
  json doc;
  doc["format"] = detail::kWeightFormat;
  doc["version"] = detail::kWeightVersion;
  doc["arch"] = "vae";
  doc["layer_dims"] = json::array({vae.input_dim(), vae.hidden_dim(), vae.latent_dim()});
  doc["layers"] = {{"encoder_hidden", detail::layer_to_json(vae.encoder_hidden())},
                   {"encoder_mean", detail::layer_to_json(vae.encoder_mean())},
                   {"encoder_logvar", detail::layer_to_json(vae.encoder_logvar())},
                   {"decoder_hidden", detail::layer_to_json(vae.decoder_hidden())},
                   {"decoder_output", detail::layer_to_json(vae.decoder_output())}};
  doc["binary_mask"] = vae.binary_mask();
  return doc.dump(1) + "\n";
}

std::shared_ptr<const Vae> parse_vae(std::string_view text) {
  using detail::json;
  json doc = detail::parse_document(text);
  try {
    const auto arch = doc.at("arch").get<std::string>();
    if (arch != "vae") throw FormatError("weight file holds arch '" + arch + "', not a vae");
    const auto& l = doc.at("layers");
    return std::make_shared<const Vae>(
        detail::layer_from_json(l.at("encoder_hidden")), detail::layer_from_json(l.at("encoder_mean")),
        detail::layer_from_json(l.at("encoder_logvar")), detail::layer_from_json(l.at("decoder_hidden")),
        detail::layer_from_json(l.at("decoder_output")), doc.at("binary_mask").get<std::vector<bool>>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed vae file: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid vae: ") + e.what());
  }
}

void save_vae(const Vae& vae, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_vae(vae);
}

std::shared_ptr<const Vae> load_vae(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_vae(buf.str());
}

}  // namespace recourse

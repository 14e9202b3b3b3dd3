#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/model.hpp"
#include "recourse/types.hpp"

namespace recourse {

// Variational autoencoder over encoded inputs. One tanh hidden layer on each
// side; the decoder ends in a sigmoid so g(z) always lies in [0,1]^d.
class Vae {
 public:
  Vae(DenseLayer encoder_hidden, DenseLayer encoder_mean, DenseLayer encoder_logvar,
      DenseLayer decoder_hidden, DenseLayer decoder_output, std::vector<bool> binary_mask);

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(enc_hidden_.weights.cols()); }
  std::size_t latent_dim() const noexcept { return static_cast<std::size_t>(enc_mean_.weights.rows()); }
  std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(enc_hidden_.weights.rows()); }
  const std::vector<bool>& binary_mask() const noexcept { return binary_mask_; }

  // Posterior mean; deterministic.
  Vector encode(const Vector& x) const;
  // Posterior (mean, log variance).
  std::pair<Vector, Vector> encode_distribution(const Vector& x) const;
  Vector decode(const Vector& z) const;
  Vector reconstruct(const Vector& x) const { return decode(encode(x)); }

  // Vector-Jacobian products: J_g(z)^T v and J_mean(x)^T v.
  Vector decode_vjp(const Vector& z, const Vector& v) const;
  Vector encode_vjp(const Vector& x, const Vector& v) const;

  std::uint64_t checksum() const;

  const DenseLayer& encoder_hidden() const noexcept { return enc_hidden_; }
  const DenseLayer& encoder_mean() const noexcept { return enc_mean_; }
  const DenseLayer& encoder_logvar() const noexcept { return enc_logvar_; }
  const DenseLayer& decoder_hidden() const noexcept { return dec_hidden_; }
  const DenseLayer& decoder_output() const noexcept { return dec_out_; }

 private:
  DenseLayer enc_hidden_, enc_mean_, enc_logvar_, dec_hidden_, dec_out_;
  std::vector<bool> binary_mask_;
};

struct VaeTrainConfig {
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 128;
  // Small datasets get extra epochs until this many optimizer steps are taken.
  int min_steps = 5000;
  std::uint64_t seed = 0;
  // 1.0 collapses the posterior on [0,1]-scaled continuous data.
  double kl_weight = 0.02;
  // 0 selects max(8, 2d).
  int hidden = 0;

  void validate() const;
};

struct VaeTrainResult {
  std::shared_ptr<const Vae> vae;
  // Negative ELBO (reconstruction + kl_weight * KL) per sample, per epoch.
  std::vector<double> epoch_loss;
};

// min(max(d, 2), 8).
std::size_t default_latent_dim(std::size_t d);

// Reconstruction loss: Bernoulli cross-entropy on binary coordinates, squared
// error on continuous ones. Adam optimizer, seeded reparameterization noise.
VaeTrainResult train_vae(const Matrix& data, const std::vector<bool>& binary_mask,
                         std::size_t latent_dim, const VaeTrainConfig& cfg);
VaeTrainResult train_vae(const EncodedDataset& data, std::size_t latent_dim, const VaeTrainConfig& cfg);

std::string serialize_vae(const Vae& vae);
std::shared_ptr<const Vae> parse_vae(std::string_view text);
void save_vae(const Vae& vae, const std::filesystem::path& path);
std::shared_ptr<const Vae> load_vae(const std::filesystem::path& path);

}  // namespace recourse

#pragma once

#include <span>
#include <vector>

#include "nasa/imaging.hpp"
#include "nasa/nn/adam.hpp"
#include "nasa/nn/network.hpp"
#include "nasa/perception.hpp"

namespace nasa {

struct PredictorConfig {
  int z_dim = 200;
  int action_dim = 1;
  int hidden = 512;
  int members = 3;
  nn::AdamOptions optim;
};

// (z, a) -> dense(hidden) ReLU -> dense(hidden) ReLU -> dense(z_dim)
std::vector<nn::LayerSpec> predictor_specs(const PredictorConfig& cfg);

// Members share the architecture and differ only by initialization; all are
// trained on the same minibatch.
class PredictorEnsemble {
 public:
  PredictorEnsemble(const PredictorConfig& cfg, Rng& rng);

  const PredictorConfig& config() const { return cfg_; }
  std::size_t size() const { return members_.size(); }

  // Mean member prediction of the next latent.
  Latent predict(const Latent& z, std::span<const float> action) const;
  // Batched mean prediction, z: [N, z_dim], actions: [N, action_dim].
  nn::Tensor<float> predict_batch(const nn::Tensor<float>& z, const nn::Tensor<float>& actions) const;

  // One Adam step per member on MSE(member(z, a), z_next). Inputs are plain
  // tensors, so no gradient can reach the encoder. Returns the mean pre-step
  // member loss.
  double update(const nn::Tensor<float>& z, const nn::Tensor<float>& actions, const nn::Tensor<float>& z_next);

  nn::Network<float>& member(std::size_t i) { return members_.at(i); }
  const nn::Network<float>& member(std::size_t i) const { return members_.at(i); }
  nn::Adam<float>& optimizer(std::size_t i) { return optimizers_.at(i); }
  const nn::Adam<float>& optimizer(std::size_t i) const { return optimizers_.at(i); }
  // Reorders members (and their optimizers); used to check order invariance.
  void permute(std::span<const std::size_t> order);

 private:
  PredictorConfig cfg_;
  std::vector<nn::Network<float>> members_;
  std::vector<nn::Adam<float>> optimizers_;
};

struct RewardWeights {
  double alpha = 1.0;
  double beta = 1.0;
};

struct RewardBreakdown {
  double r_ext = 0;
  double r_novel = 0;
  double r_surprise = 0;
  double r_total = 0;
  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

// 1 - SSIM(s, Dec(Enc(s))). With clamp_ssim the SSIM is first clamped to
// [0,1], bounding the bonus to [0,1]; otherwise it lies in [0,2].
double novelty_reward(const Autoencoder& ae, const FrameStack& s, const SsimOptions& opts = {},
                      bool clamp_ssim = true);
// Same quantity for an explicit reconstruction [1, K*C, H, W].
double novelty_from_reconstruction(const FrameStack& s, const nn::Tensor<float>& reconstruction,
                                   const SsimOptions& opts = {}, bool clamp_ssim = true);

// MSE between z_next and the ensemble's mean prediction from (z, a).
double surprise_reward(const PredictorEnsemble& ens, const Latent& z, std::span<const float> action,
                       const Latent& z_next);

// r_total = r_ext + alpha * r_novel + beta * r_surprise, evaluated left to right.
RewardBreakdown total_reward(const RewardWeights& w, double r_ext, double r_novel, double r_surprise);

}  // namespace nasa

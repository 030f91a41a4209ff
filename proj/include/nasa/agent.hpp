#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nasa/intrinsic.hpp"
#include "nasa/nn/adam.hpp"
#include "nasa/nn/checkpoint.hpp"
#include "nasa/nn/network.hpp"
#include "nasa/perception.hpp"
#include "nasa/replay.hpp"
#include "nasa/rng.hpp"

namespace nasa {

// The three ablation arms: full method, autoencoder without intrinsic
// rewards, and actor/critic directly on flattened pixels.
enum class Variant { kNasaTd3, kAeTd3, kPixelTd3 };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct Td3Hyper {
  double gamma = 0.99;
  double tau = 0.005;
  int policy_delay = 2;
  double target_noise_sigma = 0.2;
  double noise_clip = 0.5;
  double explore_sigma = 0.1;
  int batch_size = 64;
  int updates_per_step = 5;  // G
};

struct AgentConfig {
  Variant variant = Variant::kNasaTd3;
  ObservationShape obs;
  int action_dim = 1;
  int z_dim = 50;
  int ae_filters = 32;
  int actor_hidden = 1024;
  int critic_hidden = 1024;
  int predictor_hidden = 512;
  int ensemble_size = 3;
  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  double lr_encoder = 1e-3;
  double lr_decoder = 1e-3;
  double lr_predictor = 1e-3;
  Td3Hyper hyper;
  RewardWeights weights;
  bool clamp_ssim = true;
  SsimOptions ssim;

  bool uses_autoencoder() const { return variant != Variant::kPixelTd3; }
  bool uses_intrinsic() const { return variant == Variant::kNasaTd3; }
  // Input width of actor and critics: z_dim, or all pixels for pixel-td3.
  int feature_dim() const;
};

// z -> dense(h) ReLU -> dense(h) ReLU -> dense(action_dim) -> tanh
std::vector<nn::LayerSpec> actor_specs(int feature_dim, int hidden, int action_dim);
// (z, a) -> dense(h) ReLU -> dense(h) ReLU -> dense(1)
std::vector<nn::LayerSpec> critic_specs(int feature_dim, int hidden, int action_dim);

struct TickResult {
  bool warming_up = false;
  double ae_loss = 0;
  double critic_loss = 0;
  double actor_loss = 0;
  double predictor_loss = 0;
  int critic_updates = 0;
  int actor_updates = 0;
};

class Agent {
 public:
  // All parameters are drawn from `init_rng`; `noise_seed` seeds the
  // target-policy smoothing noise stream owned by the agent.
  Agent(const AgentConfig& cfg, Rng& init_rng, std::uint64_t noise_seed);

  const AgentConfig& config() const { return cfg_; }

  // Actor/critic input features for a batch of observations: the encoder's
  // latent, or the flattened pixels for pixel-td3. Never records gradients.
  nn::Tensor<float> features(const nn::Tensor<float>& obs) const;

  // actor(encode(s)); with explore, Gaussian noise then clip to [-1,1].
  std::vector<float> select_action(const FrameStack& s, bool explore, Rng& rng) const;

  // Bootstrap target y = r + gamma * (1 - done) * min(Q1', Q2')(z', pi'(z') + eps).
  // `noise` (optional) receives the clipped smoothing noise actually used.
  nn::Tensor<float> td_target(const Batch& batch, nn::Tensor<float>* noise = nullptr);

  double ae_update(const Batch& batch);
  // One Adam step for both critics on MSE to td_target; the critics' input
  // gradient also steps the encoder. Returns the summed critic loss.
  double critic_update(const Batch& batch);
  // One Adam step for the actor ascending Q1; latents are constants here so
  // neither the encoder nor the critics change. Returns -mean Q1.
  double actor_update(const Batch& batch);
  // Fits the ensemble to (z, a) -> z' with detached latents of the batch.
  double predictor_update(const Batch& batch);
  void target_sync(double tau);
  // G x {sample; ae_update; critic_update; predictor_update; every
  // policy_delay-th iteration of this tick: actor_update + target_sync}.
  TickResult train_tick(const ReplayBuffer& buffer, Rng& sampling_rng);

  // Online reward composition for one transition (nasa-td3 only computes
  // intrinsic terms; other variants return r_total == r_ext).
  RewardBreakdown compose_reward(const FrameStack& s, std::span<const float> a, const FrameStack& s_next,
                                 double r_ext) const;

  bool has_autoencoder() const { return ae_.has_value(); }
  bool has_predictor() const { return predictor_.has_value(); }
  Autoencoder& autoencoder() { return ae_.value(); }
  const Autoencoder& autoencoder() const { return ae_.value(); }
  PredictorEnsemble& predictor() { return predictor_.value(); }
  const PredictorEnsemble& predictor() const { return predictor_.value(); }
  nn::Network<float>& actor() { return actor_; }
  nn::Network<float>& critic1() { return critic1_; }
  nn::Network<float>& critic2() { return critic2_; }
  nn::Network<float>& target_actor() { return target_actor_; }
  nn::Network<float>& target_critic1() { return target_critic1_; }
  nn::Network<float>& target_critic2() { return target_critic2_; }
  const nn::Network<float>& actor() const { return actor_; }
  const nn::Network<float>& critic1() const { return critic1_; }
  const nn::Network<float>& critic2() const { return critic2_; }
  const nn::Network<float>& target_actor() const { return target_actor_; }
  const nn::Network<float>& target_critic1() const { return target_critic1_; }
  const nn::Network<float>& target_critic2() const { return target_critic2_; }
  std::int64_t iterations() const { return iterations_; }

  // Every parameter, optimizer moment/step and the noise stream state.
  std::vector<nn::NamedTensor> state_tensors() const;
  // Replaces the whole state; validates every tensor first, so a failure
  // leaves the agent untouched.
  void load_state_tensors(const std::vector<nn::NamedTensor>& tensors);
  // Hash of every parameter of every network the agent owns.
  std::uint64_t state_hash() const;

 private:
  AgentConfig cfg_;
  std::optional<Autoencoder> ae_;
  std::optional<PredictorEnsemble> predictor_;
  nn::Network<float> actor_, critic1_, critic2_;
  nn::Network<float> target_actor_, target_critic1_, target_critic2_;
  nn::Adam<float> actor_opt_, critic1_opt_, critic2_opt_;
  Rng noise_rng_;
  std::int64_t iterations_ = 0;
};

}  // namespace nasa

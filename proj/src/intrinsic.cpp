#include "nasa/intrinsic.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "nasa/rng.hpp"

namespace nasa {

std::vector<nn::LayerSpec> predictor_specs(const PredictorConfig& cfg) {
  using nn::LayerSpec;
  return {LayerSpec::dense(cfg.z_dim + cfg.action_dim, cfg.hidden), LayerSpec::relu(),
          LayerSpec::dense(cfg.hidden, cfg.hidden), LayerSpec::relu(), LayerSpec::dense(cfg.hidden, cfg.z_dim)};
}

PredictorEnsemble::PredictorEnsemble(const PredictorConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (cfg.members < 1) throw std::invalid_argument("ensemble needs at least one member");
  for (int m = 0; m < cfg.members; ++m) {
    members_.emplace_back(predictor_specs(cfg), nn::Shape{cfg.z_dim + cfg.action_dim}, rng);
    optimizers_.emplace_back(members_.back(), cfg.optim);
  }
}

nn::Tensor<float> PredictorEnsemble::predict_batch(const nn::Tensor<float>& z, const nn::Tensor<float>& actions) const {
  const nn::Tensor<float> input = nn::concat_features(z, actions);
  std::vector<nn::Tensor<float>> outs;
  outs.reserve(members_.size());
  for (const auto& m : members_) outs.push_back(m.infer(input));
  // Summing the sorted member values makes the mean exactly independent of
  // member order.
  nn::Tensor<float> mean(outs.front().shape());
  std::vector<float> column(members_.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    for (std::size_t m = 0; m < outs.size(); ++m) column[m] = outs[m][i];
    std::sort(column.begin(), column.end());
    double sum = 0;
    for (float v : column) sum += v;
    mean[i] = float(sum / double(column.size()));
  }
  return mean;
}

Latent PredictorEnsemble::predict(const Latent& z, std::span<const float> action) const {
  if (int(z.size()) != cfg_.z_dim || int(action.size()) != cfg_.action_dim) {
    throw std::invalid_argument("predictor: expected latent of " + std::to_string(cfg_.z_dim) + " and action of " +
                                std::to_string(cfg_.action_dim));
  }
  return predict_batch(nn::Tensor<float>({1, cfg_.z_dim}, z),
                       nn::Tensor<float>({1, cfg_.action_dim}, std::vector<float>(action.begin(), action.end())))
      .values();
}

double PredictorEnsemble::update(const nn::Tensor<float>& z, const nn::Tensor<float>& actions,
                                 const nn::Tensor<float>& z_next) {
  if (z.rank() != 2 || z.dim(0) == 0) throw std::invalid_argument("predictor_update: empty batch");
  const nn::Tensor<float> input = nn::concat_features(z, actions);
  double total = 0;
  for (std::size_t m = 0; m < members_.size(); ++m) {
    const nn::Tensor<float> pred = members_[m].forward(input);
    nn::Tensor<float> grad;
    total += mse_with_grad(pred, z_next, &grad);
    members_[m].backward(grad);
    optimizers_[m].step(members_[m]);
  }
  return total / double(members_.size());
}

void PredictorEnsemble::permute(std::span<const std::size_t> order) {
  if (order.size() != members_.size()) throw std::invalid_argument("permute: wrong order length");
  std::vector<nn::Network<float>> members;
  std::vector<nn::Adam<float>> optims;
  for (std::size_t i : order) {
    members.push_back(members_.at(i));
    optims.push_back(optimizers_.at(i));
  }
  members_ = std::move(members);
  optimizers_ = std::move(optims);
}

double novelty_from_reconstruction(const FrameStack& s, const nn::Tensor<float>& reconstruction,
                                   const SsimOptions& opts, bool clamp_ssim) {
  const std::vector<float> original = s.stacked();
  if (reconstruction.size() != original.size()) throw std::invalid_argument("novelty: reconstruction shape mismatch");
  const PlanarView a{s.channels(), s.height(), s.width(), original};
  const PlanarView b{s.channels(), s.height(), s.width(), reconstruction.span()};
  double value = ssim(a, b, opts);
  if (clamp_ssim) value = std::clamp(value, 0.0, 1.0);
  return 1.0 - value;
}

double novelty_reward(const Autoencoder& ae, const FrameStack& s, const SsimOptions& opts, bool clamp_ssim) {
  return novelty_from_reconstruction(s, ae.decode(ae.encode(s)), opts, clamp_ssim);
}

double surprise_reward(const PredictorEnsemble& ens, const Latent& z, std::span<const float> action,
                       const Latent& z_next) {
  if (z_next.size() != z.size()) throw std::invalid_argument("surprise: latent lengths differ");
  const Latent predicted = ens.predict(z, action);
  double sum = 0;
  for (std::size_t i = 0; i < z_next.size(); ++i) {
    const double d = double(z_next[i]) - double(predicted[i]);
    sum += d * d;
  }
  return sum / double(z_next.size());
}

RewardBreakdown total_reward(const RewardWeights& w, double r_ext, double r_novel, double r_surprise) {
  if (!(w.alpha >= 0) || !(w.beta >= 0)) throw std::invalid_argument("reward weights must be non-negative");
  RewardBreakdown b;
  b.r_ext = r_ext;
  b.r_novel = r_novel;
  b.r_surprise = r_surprise;
  b.r_total = r_ext + w.alpha * r_novel + w.beta * r_surprise;
  return b;
}

}  // namespace nasa

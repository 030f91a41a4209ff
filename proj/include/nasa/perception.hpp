#pragma once

#include <span>
#include <vector>

#include "nasa/imaging.hpp"
#include "nasa/nn/adam.hpp"
#include "nasa/nn/network.hpp"

namespace nasa {

// Shape of the agent's observation: `stack` frames of height x width x
// channels_per_frame, channel-stacked into one [stack*channels, H, W] input.
struct ObservationShape {
  int height = 84;
  int width = 84;
  int channels_per_frame = 3;
  int stack = 3;

  int channels() const { return channels_per_frame * stack; }
  std::size_t element_count() const { return std::size_t(channels()) * height * width; }
  nn::Shape sample_shape() const { return {channels(), height, width}; }
  friend bool operator==(const ObservationShape&, const ObservationShape&) = default;
};

using Latent = std::vector<float>;

struct AutoencoderConfig {
  ObservationShape obs;
  int z_dim = 200;
  int filters = 32;
  int conv_layers = 4;
  int kernel = 3;
  int first_stride = 2;
  nn::AdamOptions encoder_optim;
  nn::AdamOptions decoder_optim;
};

// 4 x conv(3x3, 32 filters, ReLU) -> flatten -> dense(z) -> layernorm -> tanh.
std::vector<nn::LayerSpec> encoder_specs(const AutoencoderConfig& cfg);
// dense -> ReLU -> unflatten -> deconvolutional mirror of the encoder -> sigmoid.
std::vector<nn::LayerSpec> decoder_specs(const AutoencoderConfig& cfg);

// [1, K*C, H, W] tensor of one stack.
nn::Tensor<float> to_tensor(const FrameStack& s);
// [N, K*C, H, W] tensor of several stacks of identical shape.
nn::Tensor<float> to_batch(std::span<const FrameStack> stacks);

class Autoencoder {
 public:
  Autoencoder(const AutoencoderConfig& cfg, Rng& rng);

  const AutoencoderConfig& config() const { return cfg_; }

  Latent encode(const FrameStack& s) const;
  nn::Tensor<float> encode_batch(const nn::Tensor<float>& obs) const;
  // Returns a [1, K*C, H, W] reconstruction with values in (0,1).
  nn::Tensor<float> decode(const Latent& z) const;
  nn::Tensor<float> decode_batch(const nn::Tensor<float>& z) const;
  nn::Tensor<float> reconstruct(const nn::Tensor<float>& obs) const { return decode_batch(encode_batch(obs)); }

  // One Adam step on both halves minimizing the mean squared reconstruction
  // error of `obs` ([N, K*C, H, W]). Returns the loss before the step.
  double update(const nn::Tensor<float>& obs);

  nn::Network<float>& encoder() { return encoder_; }
  nn::Network<float>& decoder() { return decoder_; }
  const nn::Network<float>& encoder() const { return encoder_; }
  const nn::Network<float>& decoder() const { return decoder_; }
  nn::Adam<float>& encoder_optimizer() { return encoder_opt_; }
  nn::Adam<float>& decoder_optimizer() { return decoder_opt_; }
  const nn::Adam<float>& encoder_optimizer() const { return encoder_opt_; }
  const nn::Adam<float>& decoder_optimizer() const { return decoder_opt_; }

 private:
  AutoencoderConfig cfg_;
  nn::Network<float> encoder_;
  nn::Network<float> decoder_;
  nn::Adam<float> encoder_opt_;
  nn::Adam<float> decoder_opt_;
};

// Mean squared error and its gradient with respect to `pred`.
double mse_with_grad(const nn::Tensor<float>& pred, const nn::Tensor<float>& target, nn::Tensor<float>* grad);

}  // namespace nasa

#include "nasa/perception.hpp"

#include <stdexcept>
#include <string>

#include "nasa/rng.hpp"

namespace nasa {
namespace {

struct ConvGeometry {
  int first_h, first_w;  // after the strided layer
  int last_h, last_w;    // after the final conv
  int output_padding_h, output_padding_w;
};

ConvGeometry conv_geometry(const AutoencoderConfig& cfg) {
  const int pad = cfg.kernel / 2;
  auto strided = [&](int size) { return (size + 2 * pad - cfg.kernel) / cfg.first_stride + 1; };
  ConvGeometry g{};
  g.first_h = strided(cfg.obs.height);
  g.first_w = strided(cfg.obs.width);
  const int shrink = (cfg.kernel - 1) * (cfg.conv_layers - 1);
  g.last_h = g.first_h - shrink;
  g.last_w = g.first_w - shrink;
  if (cfg.conv_layers < 1 || g.last_h < 1 || g.last_w < 1) {
    throw std::invalid_argument("observation of " + std::to_string(cfg.obs.height) + "x" +
                                std::to_string(cfg.obs.width) + " is too small for the encoder");
  }
  auto opad = [&](int size, int small) { return size - ((small - 1) * cfg.first_stride - 2 * pad + cfg.kernel); };
  g.output_padding_h = opad(cfg.obs.height, g.first_h);
  g.output_padding_w = opad(cfg.obs.width, g.first_w);
  if (g.output_padding_h != g.output_padding_w || g.output_padding_h < 0 || g.output_padding_h >= cfg.first_stride) {
    throw std::invalid_argument("decoder cannot mirror this observation shape");
  }
  return g;
}

}  // namespace

std::vector<nn::LayerSpec> encoder_specs(const AutoencoderConfig& cfg) {
  using nn::LayerSpec;
  const ConvGeometry g = conv_geometry(cfg);
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::conv2d(cfg.obs.channels(), cfg.filters, cfg.kernel, cfg.first_stride, cfg.kernel / 2));
  specs.push_back(LayerSpec::relu());
  for (int i = 1; i < cfg.conv_layers; ++i) {
    specs.push_back(LayerSpec::conv2d(cfg.filters, cfg.filters, cfg.kernel, 1, 0));
    specs.push_back(LayerSpec::relu());
  }
  specs.push_back(LayerSpec::flatten());
  specs.push_back(LayerSpec::dense(cfg.filters * g.last_h * g.last_w, cfg.z_dim));
  specs.push_back(LayerSpec::layernorm(cfg.z_dim));
  specs.push_back(LayerSpec::tanh());
  return specs;
}

std::vector<nn::LayerSpec> decoder_specs(const AutoencoderConfig& cfg) {
  using nn::LayerSpec;
  const ConvGeometry g = conv_geometry(cfg);
  std::vector<LayerSpec> specs;
  specs.push_back(LayerSpec::dense(cfg.z_dim, cfg.filters * g.last_h * g.last_w));
  specs.push_back(LayerSpec::relu());
  specs.push_back(LayerSpec::unflatten({cfg.filters, g.last_h, g.last_w}));
  for (int i = 1; i < cfg.conv_layers; ++i) {
    specs.push_back(LayerSpec::deconv2d(cfg.filters, cfg.filters, cfg.kernel, 1, 0, 0));
    specs.push_back(LayerSpec::relu());
  }
  specs.push_back(LayerSpec::deconv2d(cfg.filters, cfg.obs.channels(), cfg.kernel, cfg.first_stride, cfg.kernel / 2,
                                      g.output_padding_h));
  specs.push_back(LayerSpec::sigmoid());
  return specs;
}

nn::Tensor<float> to_tensor(const FrameStack& s) {
  nn::Tensor<float> t({1, s.channels(), s.height(), s.width()});
  s.stacked_into(t.span());
  return t;
}

nn::Tensor<float> to_batch(std::span<const FrameStack> stacks) {
  if (stacks.empty()) throw std::invalid_argument("to_batch: no stacks");
  const FrameStack& first = stacks.front();
  nn::Tensor<float> t({int(stacks.size()), first.channels(), first.height(), first.width()});
  const std::size_t row = t.row_size();
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    if (stacks[i].channels() != first.channels() || stacks[i].height() != first.height() ||
        stacks[i].width() != first.width()) {
      throw std::invalid_argument("to_batch: stacks differ in shape");
    }
    stacks[i].stacked_into(t.span().subspan(i * row, row));
  }
  return t;
}

Autoencoder::Autoencoder(const AutoencoderConfig& cfg, Rng& rng)
    : cfg_(cfg),
      encoder_(encoder_specs(cfg), cfg.obs.sample_shape(), rng),
      decoder_(decoder_specs(cfg), {cfg.z_dim}, rng),
      encoder_opt_(encoder_, cfg.encoder_optim),
      decoder_opt_(decoder_, cfg.decoder_optim) {}

Latent Autoencoder::encode(const FrameStack& s) const {
  if (s.channels() != cfg_.obs.channels() || s.height() != cfg_.obs.height || s.width() != cfg_.obs.width) {
    throw std::invalid_argument("encode: observation shape does not match the encoder");
  }
  return encode_batch(to_tensor(s)).values();
}

nn::Tensor<float> Autoencoder::encode_batch(const nn::Tensor<float>& obs) const { return encoder_.infer(obs); }

nn::Tensor<float> Autoencoder::decode(const Latent& z) const {
  if (int(z.size()) != cfg_.z_dim) {
    throw std::invalid_argument("decode: latent length " + std::to_string(z.size()) + ", expected " +
                                std::to_string(cfg_.z_dim));
  }
  return decoder_.infer(nn::Tensor<float>({1, cfg_.z_dim}, z));
}

nn::Tensor<float> Autoencoder::decode_batch(const nn::Tensor<float>& z) const { return decoder_.infer(z); }

double mse_with_grad(const nn::Tensor<float>& pred, const nn::Tensor<float>& target, nn::Tensor<float>* grad) {
  if (pred.shape() != target.shape()) {
    throw std::invalid_argument("mse: shape " + nn::shape_to_string(pred.shape()) + " vs " +
                                nn::shape_to_string(target.shape()));
  }
  const std::size_t n = pred.size();
  if (n == 0) throw std::invalid_argument("mse: empty tensors");
  if (grad) *grad = nn::Tensor<float>(pred.shape());
  double sum = 0;
  const float scale = float(2.0 / double(n));
  for (std::size_t i = 0; i < n; ++i) {
    const float d = pred[i] - target[i];
    sum += double(d) * double(d);
    if (grad) (*grad)[i] = scale * d;
  }
  return sum / double(n);
}

double Autoencoder::update(const nn::Tensor<float>& obs) {
  if (obs.rank() == 0 || obs.dim(0) == 0) throw std::invalid_argument("ae_update: empty batch");
  const nn::Tensor<float> z = encoder_.forward(obs);
  const nn::Tensor<float> recon = decoder_.forward(z);
  nn::Tensor<float> grad;
  const double loss = mse_with_grad(recon, obs, &grad);
  const nn::Tensor<float> dz = decoder_.backward(grad);
  encoder_.backward(dz);
  decoder_opt_.step(decoder_);
  encoder_opt_.step(encoder_);
  return loss;
}

}  // namespace nasa

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nasa/nn/tensor.hpp"

namespace nasa {
class Rng;
}

namespace nasa::nn {

enum class LayerKind { kConv2d, kDeconv2d, kDense, kFlatten, kUnflatten, kRelu, kTanh, kSigmoid, kLayerNorm };

std::string to_string(LayerKind kind);

// Construction recipe for one layer. Only the fields relevant to `kind` are read.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  // dense
  int in_features = 0;
  int out_features = 0;
  // conv2d / deconv2d
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  int stride = 1;
  int padding = 0;
  int output_padding = 0;
  // unflatten: per-sample target shape
  Shape sample_shape;
  // layernorm
  int features = 0;
  double eps = 1e-5;

  static LayerSpec dense(int in, int out);
  static LayerSpec conv2d(int in_ch, int out_ch, int kernel, int stride, int padding);
  static LayerSpec deconv2d(int in_ch, int out_ch, int kernel, int stride, int padding, int output_padding);
  static LayerSpec flatten();
  static LayerSpec unflatten(Shape sample_shape);
  static LayerSpec relu();
  static LayerSpec tanh();
  static LayerSpec sigmoid();
  static LayerSpec layernorm(int features);
};

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

template <typename T>
class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }

  // Output shape for a full (batch-first) input shape; throws on mismatch.
  virtual Shape output_shape(const Shape& in) const = 0;
  // Stateless evaluation, safe on a shared const instance.
  virtual Tensor<T> infer(const Tensor<T>& x) const = 0;
  // Evaluation that records what backward() needs.
  virtual Tensor<T> forward(const Tensor<T>& x) = 0;
  // Returns dLoss/dInput; adds dLoss/dParam into grads when accumulate is set.
  virtual Tensor<T> backward(const Tensor<T>& grad_out, bool accumulate) = 0;

  virtual std::vector<Param<T>*> params() { return {}; }
  virtual void initialize(Rng& /*rng*/) {}
  virtual void clear_cache() = 0;
  virtual bool has_cache() const = 0;

 private:
  LayerSpec spec_;
};

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec);

// Column packing used by the convolution kernels. `src` is one [C,H,W] image;
// the output grid is [out_h, out_w]; `cols` is [C*k*k, out_h*out_w].
template <typename T>
void im2col(const T* src, int channels, int height, int width, int kernel, int stride, int padding,
            int out_h, int out_w, T* cols);
template <typename T>
void col2im(const T* cols, int channels, int height, int width, int kernel, int stride, int padding,
            int out_h, int out_w, T* dst);

}  // namespace nasa::nn

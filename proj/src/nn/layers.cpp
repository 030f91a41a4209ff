#include "nasa/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "nasa/rng.hpp"

namespace nasa::nn {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kDeconv2d: return "deconv2d";
    case LayerKind::kDense: return "dense";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kUnflatten: return "unflatten";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kTanh: return "tanh";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kLayerNorm: return "layernorm";
  }
  return "unknown";
}

LayerSpec LayerSpec::dense(int in, int out) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in_features = in;
  s.out_features = out;
  return s;
}

LayerSpec LayerSpec::conv2d(int in_ch, int out_ch, int kernel, int stride, int padding) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.in_channels = in_ch;
  s.out_channels = out_ch;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::deconv2d(int in_ch, int out_ch, int kernel, int stride, int padding,
                              int output_padding) {
  LayerSpec s = conv2d(in_ch, out_ch, kernel, stride, padding);
  s.kind = LayerKind::kDeconv2d;
  s.output_padding = output_padding;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

LayerSpec LayerSpec::unflatten(Shape sample_shape) {
  LayerSpec s;
  s.kind = LayerKind::kUnflatten;
  s.sample_shape = std::move(sample_shape);
  return s;
}

LayerSpec LayerSpec::relu() { return LayerSpec{}; }

LayerSpec LayerSpec::tanh() {
  LayerSpec s;
  s.kind = LayerKind::kTanh;
  return s;
}

LayerSpec LayerSpec::sigmoid() {
  LayerSpec s;
  s.kind = LayerKind::kSigmoid;
  return s;
}

LayerSpec LayerSpec::layernorm(int features) {
  LayerSpec s;
  s.kind = LayerKind::kLayerNorm;
  s.features = features;
  return s;
}

template <typename T>
void im2col(const T* src, int channels, int height, int width, int kernel, int stride, int padding,
            int out_h, int out_w, T* cols) {
  const int grid = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < kernel; ++ki) {
      for (int kj = 0; kj < kernel; ++kj) {
        T* row = cols + std::size_t((c * kernel + ki) * kernel + kj) * grid;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ki;
          T* dst = row + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill_n(dst, out_w, T{0});
            continue;
          }
          const T* line = src + (std::size_t(c) * height + iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kj;
            dst[ox] = (ix >= 0 && ix < width) ? line[ix] : T{0};
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* cols, int channels, int height, int width, int kernel, int stride, int padding,
            int out_h, int out_w, T* dst) {
  const int grid = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ki = 0; ki < kernel; ++ki) {
      for (int kj = 0; kj < kernel; ++kj) {
        const T* row = cols + std::size_t((c * kernel + ki) * kernel + kj) * grid;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ki;
          if (iy < 0 || iy >= height) continue;
          T* line = dst + (std::size_t(c) * height + iy) * width;
          const T* src = row + oy * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kj;
            if (ix >= 0 && ix < width) line[ix] += src[ox];
          }
        }
      }
    }
  }
}

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

[[noreturn]] void shape_error(const LayerSpec& spec, const Shape& got, const std::string& want) {
  throw std::invalid_argument(to_string(spec.kind) + ": input shape " + shape_to_string(got) +
                              ", expected " + want);
}

template <typename T>
void init_uniform(Tensor<T>& w, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(double(fan_in));
  for (auto& v : w.values()) v = T(rng.uniform(-bound, bound));
}

template <typename T>
class CachedLayer : public Layer<T> {
 public:
  using Layer<T>::Layer;
  void clear_cache() override { input_ = Tensor<T>(); has_ = false; }
  bool has_cache() const override { return has_; }

 protected:
  const Tensor<T>& cached_input() const {
    if (!has_) throw std::logic_error(to_string(this->spec().kind) + ": backward without forward");
    return input_;
  }
  void remember(const Tensor<T>& x) { input_ = x; has_ = true; }
  void remember(Tensor<T>&& x) { input_ = std::move(x); has_ = true; }

 private:
  Tensor<T> input_;
  bool has_ = false;
};

template <typename T>
class Dense final : public CachedLayer<T> {
 public:
  explicit Dense(const LayerSpec& spec) : CachedLayer<T>(spec) {
    weight_ = {"weight", Tensor<T>({spec.out_features, spec.in_features}),
               Tensor<T>({spec.out_features, spec.in_features})};
    bias_ = {"bias", Tensor<T>({spec.out_features}), Tensor<T>({spec.out_features})};
  }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 2 || in[1] != this->spec().in_features) {
      shape_error(this->spec(), in, "[N," + std::to_string(this->spec().in_features) + "]");
    }
    return {in[0], this->spec().out_features};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y(output_shape(x.shape()));
    const int n = x.dim(0), in = this->spec().in_features, out = this->spec().out_features;
    ConstMapMat<T> X(x.data(), n, in);
    ConstMapMat<T> W(weight_.value.data(), out, in);
    MapMat<T> Y(y.data(), n, out);
    Y.noalias() = X * W.transpose();
    Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias_.value.data(), out);
    Y.rowwise() += b;
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = infer(x);
    this->remember(x);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, bool accumulate) override {
    const Tensor<T>& x = this->cached_input();
    if (gy.shape() != output_shape(x.shape())) shape_error(this->spec(), gy.shape(), "matching grad");
    const int n = x.dim(0), in = this->spec().in_features, out = this->spec().out_features;
    ConstMapMat<T> X(x.data(), n, in);
    ConstMapMat<T> G(gy.data(), n, out);
    ConstMapMat<T> W(weight_.value.data(), out, in);
    if (accumulate) {
      MapMat<T> dW(weight_.grad.data(), out, in);
      dW.noalias() += G.transpose() * X;
      // Plain loops: Eigen's vectorized reductions depend on pointer alignment,
      // which would make results differ between copies of a network.
      T* db = bias_.grad.data();
      for (int i = 0; i < n; ++i) {
        const T* g = gy.data() + std::size_t(i) * out;
        for (int j = 0; j < out; ++j) db[j] += g[j];
      }
    }
    Tensor<T> gx(x.shape());
    MapMat<T> GX(gx.data(), n, in);
    GX.noalias() = G * W;
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  void initialize(Rng& rng) override {
    init_uniform(weight_.value, this->spec().in_features, rng);
    bias_.value.fill(T{0});
  }

 private:
  Param<T> weight_, bias_;
};

inline int conv_out(int size, int kernel, int stride, int padding) {
  return (size + 2 * padding - kernel) / stride + 1;
}

template <typename T>
class Conv2d final : public CachedLayer<T> {
 public:
  explicit Conv2d(const LayerSpec& spec) : CachedLayer<T>(spec) {
    const int k = spec.kernel;
    weight_ = {"weight", Tensor<T>({spec.out_channels, spec.in_channels, k, k}),
               Tensor<T>({spec.out_channels, spec.in_channels, k, k})};
    bias_ = {"bias", Tensor<T>({spec.out_channels}), Tensor<T>({spec.out_channels})};
  }

  Shape output_shape(const Shape& in) const override {
    const auto& s = this->spec();
    if (in.size() != 4 || in[1] != s.in_channels || in[2] + 2 * s.padding < s.kernel ||
        in[3] + 2 * s.padding < s.kernel) {
      shape_error(s, in, "[N," + std::to_string(s.in_channels) + ",H,W]");
    }
    return {in[0], s.out_channels, conv_out(in[2], s.kernel, s.stride, s.padding),
            conv_out(in[3], s.kernel, s.stride, s.padding)};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    const auto& s = this->spec();
    const Shape os = output_shape(x.shape());
    Tensor<T> y(os);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    const int rows = s.in_channels * s.kernel * s.kernel, grid = oh * ow;
    std::vector<T> cols(std::size_t(rows) * grid);
    ConstMapMat<T> W(weight_.value.data(), s.out_channels, rows);
    for (int i = 0; i < n; ++i) {
      im2col(x.data() + std::size_t(i) * x.row_size(), s.in_channels, h, w, s.kernel, s.stride,
             s.padding, oh, ow, cols.data());
      MapMat<T> Y(y.data() + std::size_t(i) * y.row_size(), s.out_channels, grid);
      Y.noalias() = W * ConstMapMat<T>(cols.data(), rows, grid);
      for (int f = 0; f < s.out_channels; ++f) Y.row(f).array() += bias_.value[f];
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = infer(x);
    this->remember(x);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, bool accumulate) override {
    const auto& s = this->spec();
    const Tensor<T>& x = this->cached_input();
    const Shape os = output_shape(x.shape());
    if (gy.shape() != os) shape_error(s, gy.shape(), shape_to_string(os));
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    const int rows = s.in_channels * s.kernel * s.kernel, grid = oh * ow;
    std::vector<T> cols(std::size_t(rows) * grid);
    ConstMapMat<T> W(weight_.value.data(), s.out_channels, rows);
    MapMat<T> dW(weight_.grad.data(), s.out_channels, rows);
    Tensor<T> gx(x.shape());
    for (int i = 0; i < n; ++i) {
      ConstMapMat<T> G(gy.data() + std::size_t(i) * gy.row_size(), s.out_channels, grid);
      if (accumulate) {
        im2col(x.data() + std::size_t(i) * x.row_size(), s.in_channels, h, w, s.kernel, s.stride,
               s.padding, oh, ow, cols.data());
        dW.noalias() += G * ConstMapMat<T>(cols.data(), rows, grid).transpose();
        for (int f = 0; f < s.out_channels; ++f) {
          const T* g = G.data() + std::size_t(f) * grid;
          T acc{0};
          for (int j = 0; j < grid; ++j) acc += g[j];
          bias_.grad[f] += acc;
        }
      }
      MapMat<T> C(cols.data(), rows, grid);
      C.noalias() = W.transpose() * G;
      col2im(cols.data(), s.in_channels, h, w, s.kernel, s.stride, s.padding, oh, ow,
             gx.data() + std::size_t(i) * gx.row_size());
    }
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  void initialize(Rng& rng) override {
    const auto& s = this->spec();
    init_uniform(weight_.value, s.in_channels * s.kernel * s.kernel, rng);
    bias_.value.fill(T{0});
  }

 private:
  Param<T> weight_, bias_;
};

// Transposed convolution: the adjoint of Conv2d with the same geometry.
template <typename T>
class Deconv2d final : public CachedLayer<T> {
 public:
  explicit Deconv2d(const LayerSpec& spec) : CachedLayer<T>(spec) {
    const int k = spec.kernel;
    weight_ = {"weight", Tensor<T>({spec.in_channels, spec.out_channels, k, k}),
               Tensor<T>({spec.in_channels, spec.out_channels, k, k})};
    bias_ = {"bias", Tensor<T>({spec.out_channels}), Tensor<T>({spec.out_channels})};
  }

  Shape output_shape(const Shape& in) const override {
    const auto& s = this->spec();
    if (in.size() != 4 || in[1] != s.in_channels || in[2] < 1 || in[3] < 1) {
      shape_error(s, in, "[N," + std::to_string(s.in_channels) + ",H,W]");
    }
    auto up = [&](int size) { return (size - 1) * s.stride - 2 * s.padding + s.kernel + s.output_padding; };
    return {in[0], s.out_channels, up(in[2]), up(in[3])};
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    const auto& s = this->spec();
    const Shape os = output_shape(x.shape());
    Tensor<T> y(os);
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    const int rows = s.out_channels * s.kernel * s.kernel, grid = h * w;
    std::vector<T> cols(std::size_t(rows) * grid);
    ConstMapMat<T> W(weight_.value.data(), s.in_channels, rows);
    for (int i = 0; i < n; ++i) {
      ConstMapMat<T> X(x.data() + std::size_t(i) * x.row_size(), s.in_channels, grid);
      MapMat<T> C(cols.data(), rows, grid);
      C.noalias() = W.transpose() * X;
      T* out = y.data() + std::size_t(i) * y.row_size();
      col2im(cols.data(), s.out_channels, oh, ow, s.kernel, s.stride, s.padding, h, w, out);
      for (int f = 0; f < s.out_channels; ++f) {
        T* plane = out + std::size_t(f) * oh * ow;
        for (int p = 0; p < oh * ow; ++p) plane[p] += bias_.value[f];
      }
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = infer(x);
    this->remember(x);
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, bool accumulate) override {
    const auto& s = this->spec();
    const Tensor<T>& x = this->cached_input();
    const Shape os = output_shape(x.shape());
    if (gy.shape() != os) shape_error(s, gy.shape(), shape_to_string(os));
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3), oh = os[2], ow = os[3];
    const int rows = s.out_channels * s.kernel * s.kernel, grid = h * w;
    std::vector<T> cols(std::size_t(rows) * grid);
    ConstMapMat<T> W(weight_.value.data(), s.in_channels, rows);
    MapMat<T> dW(weight_.grad.data(), s.in_channels, rows);
    Tensor<T> gx(x.shape());
    for (int i = 0; i < n; ++i) {
      const T* g = gy.data() + std::size_t(i) * gy.row_size();
      im2col(g, s.out_channels, oh, ow, s.kernel, s.stride, s.padding, h, w, cols.data());
      ConstMapMat<T> C(cols.data(), rows, grid);
      ConstMapMat<T> X(x.data() + std::size_t(i) * x.row_size(), s.in_channels, grid);
      if (accumulate) {
        dW.noalias() += X * C.transpose();
        for (int f = 0; f < s.out_channels; ++f) {
          const T* plane = g + std::size_t(f) * oh * ow;
          T acc{0};
          for (int p = 0; p < oh * ow; ++p) acc += plane[p];
          bias_.grad[f] += acc;
        }
      }
      MapMat<T> GX(gx.data() + std::size_t(i) * gx.row_size(), s.in_channels, grid);
      GX.noalias() = W * C;
    }
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  void initialize(Rng& rng) override {
    const auto& s = this->spec();
    init_uniform(weight_.value, s.in_channels * s.kernel * s.kernel, rng);
    bias_.value.fill(T{0});
  }

 private:
  Param<T> weight_, bias_;
};

template <typename T>
class Reshape final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  Shape output_shape(const Shape& in) const override {
    if (in.size() < 2) shape_error(this->spec(), in, "rank >= 2");
    Shape sample(in.begin() + 1, in.end());
    if (this->spec().kind == LayerKind::kFlatten) {
      return {in[0], int(shape_numel(sample))};
    }
    if (shape_numel(sample) != shape_numel(this->spec().sample_shape)) {
      shape_error(this->spec(), in, "[N," + std::to_string(shape_numel(this->spec().sample_shape)) + "]");
    }
    Shape out{in[0]};
    out.insert(out.end(), this->spec().sample_shape.begin(), this->spec().sample_shape.end());
    return out;
  }

  Tensor<T> infer(const Tensor<T>& x) const override { return x.reshaped(output_shape(x.shape())); }
  Tensor<T> forward(const Tensor<T>& x) override {
    in_shape_ = x.shape();
    has_ = true;
    return infer(x);
  }
  Tensor<T> backward(const Tensor<T>& gy, bool) override {
    if (!has_) throw std::logic_error(to_string(this->spec().kind) + ": backward without forward");
    return gy.reshaped(in_shape_);
  }
  void clear_cache() override { has_ = false; }
  bool has_cache() const override { return has_; }

 private:
  Shape in_shape_;
  bool has_ = false;
};

// Elementwise activation; caches its output since all three derivatives are
// expressible in it.
template <typename T>
class Activation final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> y = x;
    switch (this->spec().kind) {
      case LayerKind::kRelu:
        for (auto& v : y.values()) v = v > T{0} ? v : T{0};
        break;
      case LayerKind::kTanh:
        for (auto& v : y.values()) v = std::tanh(v);
        break;
      default:
        for (auto& v : y.values()) v = T{1} / (T{1} + std::exp(-v));
        break;
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    out_ = infer(x);
    has_ = true;
    return out_;
  }

  Tensor<T> backward(const Tensor<T>& gy, bool) override {
    if (!has_) throw std::logic_error(to_string(this->spec().kind) + ": backward without forward");
    if (gy.shape() != out_.shape()) shape_error(this->spec(), gy.shape(), shape_to_string(out_.shape()));
    Tensor<T> gx = gy;
    const T* y = out_.data();
    T* g = gx.data();
    const std::size_t n = gx.size();
    switch (this->spec().kind) {
      case LayerKind::kRelu:
        for (std::size_t i = 0; i < n; ++i) g[i] = y[i] > T{0} ? g[i] : T{0};
        break;
      case LayerKind::kTanh:
        for (std::size_t i = 0; i < n; ++i) g[i] *= T{1} - y[i] * y[i];
        break;
      default:
        for (std::size_t i = 0; i < n; ++i) g[i] *= y[i] * (T{1} - y[i]);
        break;
    }
    return gx;
  }

  void clear_cache() override { out_ = Tensor<T>(); has_ = false; }
  bool has_cache() const override { return has_; }

 private:
  Tensor<T> out_;
  bool has_ = false;
};

// Per-sample normalization over the feature axis followed by a learned affine.
template <typename T>
class LayerNorm final : public Layer<T> {
 public:
  explicit LayerNorm(const LayerSpec& spec) : Layer<T>(spec) {
    gamma_ = {"gamma", Tensor<T>({spec.features}, T{1}), Tensor<T>({spec.features})};
    beta_ = {"beta", Tensor<T>({spec.features}), Tensor<T>({spec.features})};
  }

  Shape output_shape(const Shape& in) const override {
    if (in.size() != 2 || in[1] != this->spec().features) {
      shape_error(this->spec(), in, "[N," + std::to_string(this->spec().features) + "]");
    }
    return in;
  }

  Tensor<T> infer(const Tensor<T>& x) const override {
    Tensor<T> xhat, inv;
    return normalize(x, xhat, inv);
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = normalize(x, xhat_, inv_std_);
    has_ = true;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy, bool accumulate) override {
    if (!has_) throw std::logic_error("layernorm: backward without forward");
    if (gy.shape() != xhat_.shape()) shape_error(this->spec(), gy.shape(), shape_to_string(xhat_.shape()));
    const int n = gy.dim(0), d = gy.dim(1);
    Tensor<T> gx(gy.shape());
    for (int i = 0; i < n; ++i) {
      const T* g = gy.data() + std::size_t(i) * d;
      const T* xh = xhat_.data() + std::size_t(i) * d;
      T* out = gx.data() + std::size_t(i) * d;
      double mean_g = 0, mean_gx = 0;
      for (int j = 0; j < d; ++j) {
        const double dxh = double(g[j]) * double(gamma_.value[j]);
        mean_g += dxh;
        mean_gx += dxh * double(xh[j]);
        if (accumulate) {
          gamma_.grad[j] += g[j] * xh[j];
          beta_.grad[j] += g[j];
        }
      }
      mean_g /= d;
      mean_gx /= d;
      for (int j = 0; j < d; ++j) {
        const double dxh = double(g[j]) * double(gamma_.value[j]);
        out[j] = T(double(inv_std_[i]) * (dxh - mean_g - double(xh[j]) * mean_gx));
      }
    }
    return gx;
  }

  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  void initialize(Rng&) override {
    gamma_.value.fill(T{1});
    beta_.value.fill(T{0});
  }
  void clear_cache() override { xhat_ = Tensor<T>(); has_ = false; }
  bool has_cache() const override { return has_; }

 private:
  Tensor<T> normalize(const Tensor<T>& x, Tensor<T>& xhat, Tensor<T>& inv_std) const {
    output_shape(x.shape());
    const int n = x.dim(0), d = x.dim(1);
    xhat = Tensor<T>(x.shape());
    inv_std = Tensor<T>({n});
    Tensor<T> y(x.shape());
    for (int i = 0; i < n; ++i) {
      const T* in = x.data() + std::size_t(i) * d;
      double mean = 0;
      for (int j = 0; j < d; ++j) mean += in[j];
      mean /= d;
      double var = 0;
      for (int j = 0; j < d; ++j) var += (in[j] - mean) * (in[j] - mean);
      var /= d;
      const double inv = 1.0 / std::sqrt(var + this->spec().eps);
      inv_std[i] = T(inv);
      for (int j = 0; j < d; ++j) {
        const T xh = T((in[j] - mean) * inv);
        xhat[std::size_t(i) * d + j] = xh;
        y[std::size_t(i) * d + j] = gamma_.value[j] * xh + beta_.value[j];
      }
    }
    return y;
  }

  Param<T> gamma_, beta_;
  Tensor<T> xhat_, inv_std_;
  bool has_ = false;
};

}  // namespace

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kDense: return std::make_unique<Dense<T>>(spec);
    case LayerKind::kConv2d: return std::make_unique<Conv2d<T>>(spec);
    case LayerKind::kDeconv2d: return std::make_unique<Deconv2d<T>>(spec);
    case LayerKind::kFlatten:
    case LayerKind::kUnflatten: return std::make_unique<Reshape<T>>(spec);
    case LayerKind::kRelu:
    case LayerKind::kTanh:
    case LayerKind::kSigmoid: return std::make_unique<Activation<T>>(spec);
    case LayerKind::kLayerNorm: return std::make_unique<LayerNorm<T>>(spec);
  }
  throw std::invalid_argument("unknown layer kind");
}

template std::unique_ptr<Layer<float>> make_layer<float>(const LayerSpec&);
template std::unique_ptr<Layer<double>> make_layer<double>(const LayerSpec&);
template void im2col<float>(const float*, int, int, int, int, int, int, int, int, float*);
template void im2col<double>(const double*, int, int, int, int, int, int, int, int, double*);
template void col2im<float>(const float*, int, int, int, int, int, int, int, int, float*);
template void col2im<double>(const double*, int, int, int, int, int, int, int, int, double*);

}  // namespace nasa::nn

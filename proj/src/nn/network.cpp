#include "nasa/nn/network.hpp"

#include <cmath>

#include "nasa/nn/adam.hpp"
#include "nasa/rng.hpp"

namespace nasa::nn {

template <typename T>
Network<T>::Network(std::vector<LayerSpec> specs, Shape sample_shape, Rng& rng)
    : specs_(std::move(specs)), sample_shape_(std::move(sample_shape)) {
  build();
  for (auto& layer : layers_) layer->initialize(rng);
}

template <typename T>
Network<T>::Network(const Network& other) : specs_(other.specs_), sample_shape_(other.sample_shape_) {
  build();
  copy_params_from(other);
}

template <typename T>
Network<T>& Network<T>::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

template <typename T>
void Network<T>::build() {
  layers_.clear();
  Shape shape{1};
  shape.insert(shape.end(), sample_shape_.begin(), sample_shape_.end());
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    auto layer = make_layer<T>(specs_[i]);
    try {
      shape = layer->output_shape(shape);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("layer " + std::to_string(i) + " (" + to_string(specs_[i].kind) +
                                  "): " + e.what());
    }
    layers_.push_back(std::move(layer));
  }
}

template <typename T>
Shape Network<T>::checked_input(const Tensor<T>& x) const {
  const Shape& s = x.shape();
  if (s.size() != sample_shape_.size() + 1 || !std::equal(sample_shape_.begin(), sample_shape_.end(), s.begin() + 1)) {
    throw std::invalid_argument("layer 0 (" + (specs_.empty() ? std::string("input") : to_string(specs_[0].kind)) +
                                "): input shape " + shape_to_string(s) + ", expected [N" +
                                shape_to_string(sample_shape_).replace(0, 1, sample_shape_.empty() ? "" : ","));
  }
  return s;
}

template <typename T>
Tensor<T> Network<T>::infer(const Tensor<T>& x) const {
  checked_input(x);
  Tensor<T> h = x;
  for (const auto& layer : layers_) h = layer->infer(h);
  return h;
}

template <typename T>
Tensor<T> Network<T>::forward(const Tensor<T>& x) {
  checked_input(x);
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h);
  return h;
}

template <typename T>
Tensor<T> Network<T>::backward(const Tensor<T>& grad_out, bool accumulate) {
  Tensor<T> g = grad_out;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    if (!layers_[i]->has_cache()) {
      throw std::logic_error("layer " + std::to_string(i) + " (" + to_string(specs_[i].kind) +
                             "): backward called without a cached forward pass");
    }
    g = layers_[i]->backward(g, accumulate);
  }
  return g;
}

template <typename T>
std::vector<Param<T>*> Network<T>::params() {
  std::vector<Param<T>*> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (Param<T>* p : layers_[i]->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<const Param<T>*> Network<T>::params() const {
  std::vector<const Param<T>*> out;
  for (const auto& layer : layers_) {
    for (Param<T>* p : layer->params()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<std::string> Network<T>::param_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (Param<T>* p : layers_[i]->params()) out.push_back(std::to_string(i) + "." + p->name);
  }
  return out;
}

template <typename T>
void Network<T>::zero_grad() {
  for (Param<T>* p : params()) p->grad.fill(T{0});
}

template <typename T>
void Network<T>::clear_cache() {
  for (auto& layer : layers_) layer->clear_cache();
}

template <typename T>
std::size_t Network<T>::param_count() const {
  std::size_t n = 0;
  for (const Param<T>* p : params()) n += p->value.size();
  return n;
}

template <typename T>
std::uint64_t Network<T>::param_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Param<T>* p : params()) h = hash_values(p->value.span(), h);
  return h;
}

template <typename T>
std::uint64_t Network<T>::grad_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Param<T>* p : params()) h = hash_values(p->grad.span(), h);
  return h;
}

template <typename T>
Shape Network<T>::output_sample_shape() const {
  Shape shape{1};
  shape.insert(shape.end(), sample_shape_.begin(), sample_shape_.end());
  for (const auto& layer : layers_) shape = layer->output_shape(shape);
  return Shape(shape.begin() + 1, shape.end());
}

template <typename T>
void Network<T>::copy_params_from(const Network& other) {
  auto dst = params();
  auto src = other.params();
  if (dst.size() != src.size()) throw std::invalid_argument("copy_params_from: architecture mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i]->value.shape() != src[i]->value.shape()) {
      throw std::invalid_argument("copy_params_from: shape mismatch at parameter " + std::to_string(i));
    }
    dst[i]->value = src[i]->value;
    dst[i]->grad = Tensor<T>(src[i]->value.shape());
  }
}

template <typename T>
void polyak_update(Network<T>& target, const Network<T>& source, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("polyak_update: tau must be in [0,1]");
  auto dst = target.params();
  auto src = source.params();
  if (dst.size() != src.size()) throw std::invalid_argument("polyak_update: architecture mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i]->value.shape() != src[i]->value.shape()) {
      throw std::invalid_argument("polyak_update: shape mismatch at parameter " + std::to_string(i));
    }
  }
  const T a = T(tau), b = T(1.0 - tau);
  for (std::size_t i = 0; i < dst.size(); ++i) {
    T* t = dst[i]->value.data();
    const T* s = src[i]->value.data();
    for (std::size_t j = 0; j < dst[i]->value.size(); ++j) t[j] = a * s[j] + b * t[j];
  }
}

template <typename T>
Adam<T>::Adam(const Network<T>& net, AdamOptions options) : options_(options) {
  for (const Param<T>* p : net.params()) {
    m_.emplace_back(p->value.shape());
    v_.emplace_back(p->value.shape());
  }
}

template <typename T>
void Adam<T>::step(Network<T>& net) {
  auto ps = net.params();
  if (ps.size() != m_.size()) throw std::logic_error("Adam: optimizer bound to a different network");
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, double(t_));
  const double c2 = 1.0 - std::pow(b2, double(t_));
  const double step = options_.lr / c1;
  const double inv_sqrt_c2 = 1.0 / std::sqrt(c2);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    T* w = ps[i]->value.data();
    T* g = ps[i]->grad.data();
    T* m = m_[i].data();
    T* v = v_[i].data();
    for (std::size_t j = 0; j < ps[i]->value.size(); ++j) {
      m[j] = T(b1) * m[j] + T(1.0 - b1) * g[j];
      v[j] = T(b2) * v[j] + T(1.0 - b2) * g[j] * g[j];
      w[j] -= T(step * double(m[j]) / (std::sqrt(double(v[j])) * inv_sqrt_c2 + options_.eps));
      g[j] = T{0};
    }
  }
}

template class Network<float>;
template class Network<double>;
template class Adam<float>;
template class Adam<double>;
template void polyak_update<float>(Network<float>&, const Network<float>&, double);
template void polyak_update<double>(Network<double>&, const Network<double>&, double);

}  // namespace nasa::nn

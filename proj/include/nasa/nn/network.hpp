#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nasa/nn/layers.hpp"

namespace nasa {
class Rng;
}

namespace nasa::nn {

// A feed-forward chain of layers with value semantics: copying a Network
// deep-copies its parameters (used for target networks and snapshots).
template <typename T>
class Network {
 public:
  Network() = default;
  // Validates the layer chain against `sample_shape` (input shape without the
  // batch dimension) and initializes parameters from `rng`.
  Network(std::vector<LayerSpec> specs, Shape sample_shape, Rng& rng);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  // Inference without touching the backward caches.
  Tensor<T> infer(const Tensor<T>& x) const;
  // Training forward pass; caches activations for backward().
  Tensor<T> forward(const Tensor<T>& x);
  // Back-propagates grad_out from the last forward(). Adds parameter
  // gradients when accumulate is true; always returns dLoss/dInput.
  Tensor<T> backward(const Tensor<T>& grad_out, bool accumulate = true);

  std::vector<Param<T>*> params();
  std::vector<const Param<T>*> params() const;
  // "<layer index>.<param name>", aligned with params().
  std::vector<std::string> param_names() const;
  void zero_grad();
  void clear_cache();

  std::size_t param_count() const;
  std::uint64_t param_hash() const;
  std::uint64_t grad_hash() const;

  const Shape& sample_shape() const { return sample_shape_; }
  Shape output_sample_shape() const;
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::size_t layer_count() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }

  // Copies parameter values from a network of identical architecture.
  void copy_params_from(const Network& other);

 private:
  void build();
  Shape checked_input(const Tensor<T>& x) const;

  std::vector<LayerSpec> specs_;
  Shape sample_shape_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

// target <- tau * source + (1 - tau) * target, elementwise.
template <typename T>
void polyak_update(Network<T>& target, const Network<T>& source, double tau);

}  // namespace nasa::nn

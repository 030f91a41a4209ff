#pragma once

#include <cstdint>
#include <vector>

#include "nasa/nn/network.hpp"

namespace nasa::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam bound to one network's parameter list.
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(const Network<T>& net, AdamOptions options);

  // Applies one update from the accumulated gradients, then zeroes them.
  void step(Network<T>& net);

  std::int64_t steps() const { return t_; }
  void set_steps(std::int64_t t) { t_ = t; }
  const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }

  std::vector<Tensor<T>>& first_moments() { return m_; }
  std::vector<Tensor<T>>& second_moments() { return v_; }
  const std::vector<Tensor<T>>& first_moments() const { return m_; }
  const std::vector<Tensor<T>>& second_moments() const { return v_; }

 private:
  AdamOptions options_;
  std::int64_t t_ = 0;
  std::vector<Tensor<T>> m_, v_;
};

}  // namespace nasa::nn

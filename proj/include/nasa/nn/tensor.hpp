#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nasa::nn {

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t acc, int d) { return acc * static_cast<std::size_t>(d); });
}

std::string shape_to_string(const Shape& shape);

// Dense row-major tensor. The first dimension is the batch for every layer
// input and output.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0})
      : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_numel(shape_)) {
      throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape_to_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  int dim(std::size_t i) const { return shape_.at(i); }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  // Same data, new shape of equal element count.
  Tensor reshaped(Shape shape) const {
    if (shape_numel(shape) != data_.size()) {
      throw std::invalid_argument("cannot reshape " + shape_to_string(shape_) + " to " +
                                  shape_to_string(shape));
    }
    return Tensor(std::move(shape), data_);
  }

  // Elements per batch row.
  std::size_t row_size() const { return shape_.empty() || shape_[0] == 0 ? 0 : data_.size() / shape_[0]; }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(data_.begin(), data_.end()));
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

// Concatenates two batch-major 2-D tensors along the feature axis.
template <typename T>
Tensor<T> concat_features(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != b.dim(0)) {
    throw std::invalid_argument("concat_features needs [N,A] and [N,B], got " +
                                shape_to_string(a.shape()) + " and " + shape_to_string(b.shape()));
  }
  const int n = a.dim(0), da = a.dim(1), db = b.dim(1);
  Tensor<T> out({n, da + db});
  for (int i = 0; i < n; ++i) {
    std::copy_n(a.data() + std::size_t(i) * da, da, out.data() + std::size_t(i) * (da + db));
    std::copy_n(b.data() + std::size_t(i) * db, db, out.data() + std::size_t(i) * (da + db) + da);
  }
  return out;
}

// Inverse of concat_features: returns columns [begin, begin+count).
template <typename T>
Tensor<T> slice_features(const Tensor<T>& x, int begin, int count) {
  if (x.rank() != 2 || begin < 0 || begin + count > x.dim(1)) {
    throw std::invalid_argument("slice_features out of range for " + shape_to_string(x.shape()));
  }
  const int n = x.dim(0), d = x.dim(1);
  Tensor<T> out({n, count});
  for (int i = 0; i < n; ++i) {
    std::copy_n(x.data() + std::size_t(i) * d + begin, count, out.data() + std::size_t(i) * count);
  }
  return out;
}

// FNV-1a over the raw bytes of every value; used to detect parameter writes.
template <typename T>
std::uint64_t hash_values(std::span<const T> values, std::uint64_t seed = 1469598103934665603ULL) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < values.size_bytes(); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace nasa::nn

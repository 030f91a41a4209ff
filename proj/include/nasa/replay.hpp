#pragma once

#include <cstdint>
#include <vector>

#include "nasa/imaging.hpp"
#include "nasa/intrinsic.hpp"
#include "nasa/nn/tensor.hpp"

namespace nasa {

class Rng;

struct Transition {
  FrameStack s;
  std::vector<float> a;
  double r_total = 0;
  RewardBreakdown breakdown;
  FrameStack s_next;
  bool done = false;
};

// Minibatch in network layout.
struct Batch {
  nn::Tensor<float> obs;       // [N, K*C, H, W]
  nn::Tensor<float> actions;   // [N, A]
  nn::Tensor<float> rewards;   // [N, 1]
  nn::Tensor<float> next_obs;  // [N, K*C, H, W]
  nn::Tensor<float> done;      // [N, 1], 0 or 1
  int size() const { return actions.dim(0); }
};

// Fixed-capacity FIFO ring of transitions with uniform, with-replacement
// sampling.
//
// Storage layout: pixels are quantized to 8 bits. Frames are stored once in a
// reference-counted pool and each transition keeps 2K frame ids, so the K-1
// frames shared between s and s_next and between consecutive transitions are
// not duplicated. For a continuous run the pool holds about one frame per
// transition plus K per episode start: at 84x84x3 that is ~21 KB per
// transition, about 2.2 GB for 100k transitions (versus 12.7 GB for two full
// 8-bit stacks per transition).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  void push(const Transition& t);

  // i-th oldest stored transition, dequantized.
  Transition at(std::size_t i) const;

  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  Batch sample(std::size_t n, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& indices) const;

  std::size_t stored_frames() const { return frame_bytes_.size() - free_slots_.size(); }
  std::size_t frame_bytes() const { return frame_size_; }
  // Approximate pixel storage in bytes.
  std::size_t pixel_bytes() const { return stored_frames() * frame_size_; }

 private:
  struct Record {
    std::vector<std::uint32_t> frames;  // K ids for s, then K for s_next
    std::vector<float> action;
    double r_total;
    RewardBreakdown breakdown;
    bool done;
  };

  std::uint32_t intern(const std::vector<std::uint8_t>& pixels, const std::vector<std::uint32_t>& candidates);
  void release(const Record& r);
  Image frame_image(std::uint32_t id) const;
  void fill_stack(const Record& r, std::size_t offset, float* out) const;

  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest record once full
  std::vector<Record> records_;
  std::vector<std::uint32_t> last_frames_;

  int frame_h_ = 0, frame_w_ = 0, frame_c_ = 0, stack_ = 0, action_dim_ = 0;
  std::size_t frame_size_ = 0;
  std::vector<std::vector<std::uint8_t>> frame_bytes_;
  std::vector<std::uint32_t> refcount_;
  std::vector<std::uint32_t> free_slots_;
};

}  // namespace nasa

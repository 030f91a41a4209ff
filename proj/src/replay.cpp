#include "nasa/replay.hpp"

#include <algorithm>
#include <stdexcept>

#include "nasa/rng.hpp"

namespace nasa {
namespace {

std::vector<std::uint8_t> quantize(const Image& img) {
  std::vector<std::uint8_t> out(img.data().size());
  std::transform(img.data().begin(), img.data().end(), out.begin(), quantize_pixel);
  return out;
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

std::uint32_t ReplayBuffer::intern(const std::vector<std::uint8_t>& pixels,
                                   const std::vector<std::uint32_t>& candidates) {
  for (std::uint32_t id : candidates) {
    if (refcount_[id] > 0 && frame_bytes_[id] == pixels) {
      ++refcount_[id];
      return id;
    }
  }
  std::uint32_t id;
  if (!free_slots_.empty()) {
    id = free_slots_.back();
    free_slots_.pop_back();
    frame_bytes_[id] = pixels;
  } else {
    id = std::uint32_t(frame_bytes_.size());
    frame_bytes_.push_back(pixels);
    refcount_.push_back(0);
  }
  refcount_[id] = 1;
  return id;
}

void ReplayBuffer::release(const Record& r) {
  for (std::uint32_t id : r.frames) {
    if (--refcount_[id] == 0) {
      free_slots_.push_back(id);
      std::vector<std::uint8_t>().swap(frame_bytes_[id]);
    }
  }
}

void ReplayBuffer::push(const Transition& t) {
  if (t.s.size() == 0 || t.s.size() != t.s_next.size() || !t.s.frame(0).same_shape(t.s_next.frame(0))) {
    throw std::invalid_argument("replay: s and s_next must share shape");
  }
  for (float v : t.a) {
    if (!(v >= -1.f && v <= 1.f)) throw std::invalid_argument("replay: action components must lie in [-1,1]");
  }
  if (records_.empty() && frame_bytes_.empty()) {
    frame_h_ = t.s.height();
    frame_w_ = t.s.width();
    frame_c_ = t.s.frame(0).channels();
    stack_ = int(t.s.size());
    action_dim_ = int(t.a.size());
    frame_size_ = std::size_t(frame_h_) * frame_w_ * frame_c_;
  } else if (t.s.height() != frame_h_ || t.s.width() != frame_w_ || t.s.frame(0).channels() != frame_c_ ||
             int(t.s.size()) != stack_ || int(t.a.size()) != action_dim_) {
    throw std::invalid_argument("replay: transition shape differs from stored transitions");
  }

  Record rec{{}, t.a, t.r_total, t.breakdown, t.done};
  if (records_.size() == capacity_) {
    release(records_[head_]);
  }
  std::vector<std::uint32_t> candidates = last_frames_;
  rec.frames.reserve(2 * stack_);
  for (const FrameStack* stack : {&t.s, &t.s_next}) {
    for (const Image& f : stack->frames()) {
      const std::uint32_t id = intern(quantize(f), candidates);
      rec.frames.push_back(id);
      if (std::find(candidates.begin(), candidates.end(), id) == candidates.end()) candidates.push_back(id);
    }
  }
  last_frames_ = rec.frames;
  if (records_.size() < capacity_) {
    records_.push_back(std::move(rec));
  } else {
    records_[head_] = std::move(rec);
    head_ = (head_ + 1) % capacity_;
  }
}

Image ReplayBuffer::frame_image(std::uint32_t id) const {
  return Image::from_bytes(frame_h_, frame_w_, frame_c_, frame_bytes_[id]);
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= records_.size()) throw std::out_of_range("replay index out of range");
  const Record& r = records_[(head_ + i) % records_.size()];
  std::vector<Image> s, s_next;
  for (int k = 0; k < stack_; ++k) {
    s.push_back(frame_image(r.frames[k]));
    s_next.push_back(frame_image(r.frames[stack_ + k]));
  }
  return Transition{FrameStack(std::move(s)), r.action, r.r_total, r.breakdown, FrameStack(std::move(s_next)),
                    r.done};
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (records_.empty()) throw std::invalid_argument("replay: cannot sample from an empty buffer");
  if (n == 0) throw std::invalid_argument("replay: sample size must be positive");
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = std::size_t(rng.below(records_.size()));
  return idx;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const { return gather(sample_indices(n, rng)); }

void ReplayBuffer::fill_stack(const Record& r, std::size_t offset, float* out) const {
  for (int k = 0; k < stack_; ++k) {
    const auto& bytes = frame_bytes_[r.frames[offset + k]];
    for (std::size_t j = 0; j < frame_size_; ++j) out[k * frame_size_ + j] = float(bytes[j]) / 255.f;
  }
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw std::invalid_argument("replay: empty gather");
  const int n = int(indices.size());
  const int channels = stack_ * frame_c_;
  Batch b{nn::Tensor<float>({n, channels, frame_h_, frame_w_}), nn::Tensor<float>({n, action_dim_}),
          nn::Tensor<float>({n, 1}), nn::Tensor<float>({n, channels, frame_h_, frame_w_}), nn::Tensor<float>({n, 1})};
  const std::size_t row = b.obs.row_size();
  for (int i = 0; i < n; ++i) {
    if (indices[i] >= records_.size()) throw std::out_of_range("replay index out of range");
    const Record& r = records_[(head_ + indices[i]) % records_.size()];
    fill_stack(r, 0, b.obs.data() + i * row);
    fill_stack(r, stack_, b.next_obs.data() + i * row);
    std::copy(r.action.begin(), r.action.end(), b.actions.data() + std::size_t(i) * action_dim_);
    b.rewards[i] = float(r.r_total);
    b.done[i] = r.done ? 1.f : 0.f;
  }
  return b;
}

}  // namespace nasa

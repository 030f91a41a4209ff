#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nasa {

// RGB image with values in [0,1], stored planar (channel, row, column).
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels = 3, float fill = 0.f);
  Image(int height, int width, int channels, std::vector<float> data);
  // From 8-bit pixels (planar), dividing by 255.
  static Image from_bytes(int height, int width, int channels, std::span<const std::uint8_t> bytes);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  float& at(int c, int y, int x) { return data_[(std::size_t(c) * height_ + y) * width_ + x]; }
  float at(int c, int y, int x) const { return data_[(std::size_t(c) * height_ + y) * width_ + x]; }

  bool same_shape(const Image& o) const {
    return height_ == o.height_ && width_ == o.width_ && channels_ == o.channels_;
  }
  friend bool operator==(const Image&, const Image&) = default;

 private:
  int height_ = 0, width_ = 0, channels_ = 0;
  std::vector<float> data_;
};

// The K most recent frames, oldest first.
class FrameStack {
 public:
  FrameStack() = default;
  explicit FrameStack(std::vector<Image> frames);

  std::size_t size() const { return frames_.size(); }
  const Image& frame(std::size_t i) const { return frames_.at(i); }
  const std::vector<Image>& frames() const { return frames_; }
  int height() const { return frames_.front().height(); }
  int width() const { return frames_.front().width(); }
  // Channels of the whole stack (K x per-frame channels).
  int channels() const { return int(frames_.size()) * frames_.front().channels(); }
  std::size_t element_count() const;

  // Channel-stacked copy [K*C, H, W], oldest frame's channels first.
  std::vector<float> stacked() const;
  void stacked_into(std::span<float> out) const;

  friend bool operator==(const FrameStack&, const FrameStack&) = default;

 private:
  std::vector<Image> frames_;
};

FrameStack stack_reset(const Image& first, int k);
FrameStack stack_push(const FrameStack& s, const Image& next);

// Read-only view of planar image data of any channel count.
struct PlanarView {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::span<const float> data;
};

PlanarView view(const Image& img);

struct SsimOptions {
  int window = 7;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean local SSIM over every valid window position (uniform window, stride 1,
// no padding) and every channel.
double ssim(const PlanarView& x, const PlanarView& y, const SsimOptions& opts = {});
double ssim(const Image& x, const Image& y, const SsimOptions& opts = {});
// Stacks are compared over all K*C channels.
double ssim(const FrameStack& x, const FrameStack& y, const SsimOptions& opts = {});

// Binary PPM (P6), RGB, 8 bits per channel.
void write_ppm(const std::filesystem::path& path, const Image& img);

std::uint8_t quantize_pixel(float v);

}  // namespace nasa

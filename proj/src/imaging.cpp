#include "nasa/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace nasa {

Image::Image(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  if (height <= 0 || width <= 0 || channels <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (fill < 0.f || fill > 1.f) throw std::invalid_argument("pixel values must lie in [0,1]");
  data_.assign(std::size_t(height) * width * channels, fill);
}

Image::Image(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height <= 0 || width <= 0 || channels <= 0) throw std::invalid_argument("image dimensions must be positive");
  if (data_.size() != std::size_t(height) * width * channels) {
    throw std::invalid_argument("image data length does not match dimensions");
  }
  for (float v : data_) {
    if (!(v >= 0.f && v <= 1.f)) throw std::invalid_argument("pixel values must lie in [0,1]");
  }
}

Image Image::from_bytes(int height, int width, int channels, std::span<const std::uint8_t> bytes) {
  if (bytes.size() != std::size_t(height) * width * channels) {
    throw std::invalid_argument("byte buffer does not match image dimensions");
  }
  std::vector<float> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = float(bytes[i]) / 255.f;
  return Image(height, width, channels, std::move(data));
}

std::uint8_t quantize_pixel(float v) {
  return std::uint8_t(std::lround(std::clamp(v, 0.f, 1.f) * 255.f));
}

FrameStack::FrameStack(std::vector<Image> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw std::invalid_argument("frame stack must hold at least one frame");
  for (const auto& f : frames_) {
    if (!f.same_shape(frames_.front())) throw std::invalid_argument("frame stack frames differ in shape");
  }
}

std::size_t FrameStack::element_count() const {
  std::size_t n = 0;
  for (const auto& f : frames_) n += f.data().size();
  return n;
}

std::vector<float> FrameStack::stacked() const {
  std::vector<float> out(element_count());
  stacked_into(out);
  return out;
}

void FrameStack::stacked_into(std::span<float> out) const {
  if (out.size() != element_count()) throw std::invalid_argument("stacked_into: wrong output size");
  auto it = out.begin();
  for (const auto& f : frames_) it = std::copy(f.data().begin(), f.data().end(), it);
}

FrameStack stack_reset(const Image& first, int k) {
  if (k < 1) throw std::invalid_argument("stack size must be >= 1");
  return FrameStack(std::vector<Image>(std::size_t(k), first));
}

FrameStack stack_push(const FrameStack& s, const Image& next) {
  if (s.size() == 0) throw std::invalid_argument("cannot push onto an empty stack");
  if (!next.same_shape(s.frame(0))) throw std::invalid_argument("pushed frame does not match stack frame shape");
  std::vector<Image> frames(s.frames().begin() + 1, s.frames().end());
  frames.push_back(next);
  return FrameStack(std::move(frames));
}

PlanarView view(const Image& img) { return {img.channels(), img.height(), img.width(), img.data()}; }

namespace {

// Horizontal then vertical box sums over `window`, each computed by direct
// summation (no running differences) to keep rounding error at ~1 ulp.
void box_sums(const std::vector<double>& plane, int h, int w, int window, std::vector<double>& out) {
  const int ow = w - window + 1, oh = h - window + 1;
  std::vector<double> rows(std::size_t(h) * ow);
  for (int y = 0; y < h; ++y) {
    const double* line = plane.data() + std::size_t(y) * w;
    for (int x = 0; x < ow; ++x) {
      double s = 0;
      for (int k = 0; k < window; ++k) s += line[x + k];
      rows[std::size_t(y) * ow + x] = s;
    }
  }
  out.assign(std::size_t(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y) {
    for (int k = 0; k < window; ++k) {
      const double* line = rows.data() + std::size_t(y + k) * ow;
      double* dst = out.data() + std::size_t(y) * ow;
      for (int x = 0; x < ow; ++x) dst[x] += line[x];
    }
  }
}

}  // namespace

double ssim(const PlanarView& x, const PlanarView& y, const SsimOptions& opts) {
  if (x.channels != y.channels || x.height != y.height || x.width != y.width) {
    throw std::invalid_argument("ssim: shape mismatch");
  }
  const std::size_t plane = std::size_t(x.height) * x.width;
  if (x.data.size() != plane * x.channels || y.data.size() != plane * y.channels) {
    throw std::invalid_argument("ssim: data length does not match shape");
  }
  if (opts.window < 3 || opts.window % 2 == 0 || opts.window > std::min(x.height, x.width)) {
    throw std::invalid_argument("ssim: window must be odd, >= 3 and <= min(height, width)");
  }
  if (!(opts.k1 > 0) || !(opts.k2 > 0)) throw std::invalid_argument("ssim: k1 and k2 must be positive");

  const double c1 = (opts.k1 * opts.dynamic_range) * (opts.k1 * opts.dynamic_range);
  const double c2 = (opts.k2 * opts.dynamic_range) * (opts.k2 * opts.dynamic_range);
  const double inv_n = 1.0 / double(opts.window * opts.window);
  const int h = x.height, w = x.width;

  std::vector<double> px(plane), py(plane), pxx(plane), pyy(plane), pxy(plane);
  std::vector<double> sx, sy, sxx, syy, sxy;
  double total = 0;
  std::size_t count = 0;
  for (int c = 0; c < x.channels; ++c) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double a = x.data[c * plane + i], b = y.data[c * plane + i];
      px[i] = a;
      py[i] = b;
      pxx[i] = a * a;
      pyy[i] = b * b;
      pxy[i] = a * b;
    }
    box_sums(px, h, w, opts.window, sx);
    box_sums(py, h, w, opts.window, sy);
    box_sums(pxx, h, w, opts.window, sxx);
    box_sums(pyy, h, w, opts.window, syy);
    box_sums(pxy, h, w, opts.window, sxy);
    for (std::size_t i = 0; i < sx.size(); ++i) {
      const double mx = sx[i] * inv_n, my = sy[i] * inv_n;
      const double vx = sxx[i] * inv_n - mx * mx;
      const double vy = syy[i] * inv_n - my * my;
      const double cxy = sxy[i] * inv_n - mx * my;
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    count += sx.size();
  }
  return total / double(count);
}

double ssim(const Image& x, const Image& y, const SsimOptions& opts) { return ssim(view(x), view(y), opts); }

double ssim(const FrameStack& x, const FrameStack& y, const SsimOptions& opts) {
  if (x.size() != y.size() || x.size() == 0 || !x.frame(0).same_shape(y.frame(0))) {
    throw std::invalid_argument("ssim: frame stack shape mismatch");
  }
  const auto a = x.stacked(), b = y.stacked();
  return ssim(PlanarView{x.channels(), x.height(), x.width(), a}, PlanarView{y.channels(), y.height(), y.width(), b},
              opts);
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  if (img.channels() != 3) throw std::invalid_argument("PPM output needs a 3-channel image");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> row(std::size_t(img.width()) * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) row[std::size_t(x) * 3 + c] = char(quantize_pixel(img.at(c, y, x)));
    }
    os.write(row.data(), std::streamsize(row.size()));
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace nasa

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nasa/imaging.hpp"
#include "nasa/nn/network.hpp"
#include "nasa/rng.hpp"

namespace nasa::test {

inline Image random_image(int h, int w, int c, Rng& rng) {
  std::vector<float> d(std::size_t(h) * w * c);
  for (auto& v : d) v = float(rng.uniform());
  return Image(h, w, c, std::move(d));
}

inline FrameStack random_stack(int h, int w, int k, Rng& rng) {
  std::vector<Image> frames;
  for (int i = 0; i < k; ++i) frames.push_back(random_image(h, w, 3, rng));
  return FrameStack(std::move(frames));
}

// Smooth structured frame: a bright disc on a gradient, centred at (cx, cy).
inline Image blob_image(int h, int w, double cx, double cy) {
  Image img(h, w, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = (x + 0.5) / w - cx, dy = (y + 0.5) / h - cy;
      const double d = std::exp(-(dx * dx + dy * dy) / 0.02);
      img.at(0, y, x) = float(0.1 + 0.8 * d);
      img.at(1, y, x) = float(0.2 + 0.3 * double(x) / w);
      img.at(2, y, x) = float(0.9 - 0.7 * d);
    }
  }
  return img;
}

template <typename T>
nn::Tensor<T> random_tensor(const nn::Shape& shape, Rng& rng, double lo = -1, double hi = 1) {
  nn::Tensor<T> t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = T(rng.uniform(lo, hi));
  return t;
}

// Brute-force SSIM: for every window position and channel, recompute the
// means, variances and covariance from scratch.
inline double reference_ssim(const Image& a, const Image& b, int win = 7, double k1 = 0.01, double k2 = 0.03,
                             double L = 1.0) {
  const double c1 = (k1 * L) * (k1 * L), c2 = (k2 * L) * (k2 * L);
  const int wy = std::min(win, a.height()), wx = std::min(win, a.width());
  const double n = double(wy) * wx;
  double total = 0;
  long count = 0;
  for (int c = 0; c < a.channels(); ++c) {
    for (int y0 = 0; y0 + wy <= a.height(); ++y0) {
      for (int x0 = 0; x0 + wx <= a.width(); ++x0) {
        double ma = 0, mb = 0;
        for (int y = y0; y < y0 + wy; ++y)
          for (int x = x0; x < x0 + wx; ++x) {
            ma += a.at(c, y, x);
            mb += b.at(c, y, x);
          }
        ma /= n;
        mb /= n;
        double va = 0, vb = 0, cov = 0;
        for (int y = y0; y < y0 + wy; ++y)
          for (int x = x0; x < x0 + wx; ++x) {
            const double da = a.at(c, y, x) - ma, db = b.at(c, y, x) - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
          }
        va /= n;
        vb /= n;
        cov /= n;
        total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
  }
  return total / double(count);
}

struct FdReport {
  double max_rel = 0;
  int checked = 0;
  std::string worst;
};

// Relative error; `floor` keeps coordinates whose gradient is tiny next to the
// rest of their tensor from being judged on round-off alone.
inline double rel_error(double analytic, double numeric, double floor = 1e-6) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor, 1e-6});
  return std::abs(analytic - numeric) / scale;
}

template <typename T>
double max_abs(const nn::Tensor<T>& t) {
  double m = 0;
  for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(double(t[i])));
  return m;
}

// Central finite differences of L = sum(R * net(x)) against backward(R), for
// up to `per_tensor` coordinates of every parameter tensor and of the input.
inline FdReport finite_difference_check(nn::Network<double>& net, const nn::Tensor<double>& x, Rng& rng,
                                        int per_tensor = 24, double h = 1e-5) {
  const nn::Tensor<double> y0 = net.infer(x);
  const nn::Tensor<double> r = random_tensor<double>(y0.shape(), rng);
  auto loss = [&](const nn::Tensor<double>& in) {
    const nn::Tensor<double> y = net.infer(in);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) s += r[i] * y[i];
    return s;
  };
  net.zero_grad();
  net.forward(x);
  const nn::Tensor<double> gx = net.backward(r);

  FdReport rep;
  auto pick = [&](std::size_t n) {
    std::vector<std::size_t> idx;
    if (n <= std::size_t(per_tensor)) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    } else {
      for (int i = 0; i < per_tensor; ++i) idx.push_back(std::size_t(rng.below(n)));
    }
    return idx;
  };
  auto record = [&](double a, double num, double floor, const std::string& what) {
    const double e = rel_error(a, num, floor);
    ++rep.checked;
    if (e > rep.max_rel) {
      rep.max_rel = e;
      rep.worst = what + " analytic=" + std::to_string(a) + " numeric=" + std::to_string(num);
    }
  };

  const auto names = net.param_names();
  auto params = net.params();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& v = params[p]->value;
    const double floor = 1e-3 * max_abs(params[p]->grad);
    for (std::size_t i : pick(v.size())) {
      const double orig = v[i];
      v[i] = orig + h;
      const double lp = loss(x);
      v[i] = orig - h;
      const double lm = loss(x);
      v[i] = orig;
      record(params[p]->grad[i], (lp - lm) / (2 * h), floor, names[p] + "[" + std::to_string(i) + "]");
    }
  }
  nn::Tensor<double> xp = x;
  const double input_floor = 1e-3 * max_abs(gx);
  for (std::size_t i : pick(x.size())) {
    const double orig = xp[i];
    xp[i] = orig + h;
    const double lp = loss(xp);
    xp[i] = orig - h;
    const double lm = loss(xp);
    xp[i] = orig;
    record(gx[i], (lp - lm) / (2 * h), input_floor, "input[" + std::to_string(i) + "]");
  }
  net.zero_grad();
  return rep;
}

}  // namespace nasa::test

#include "nasa/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nasa {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSupersample = 3;

using Rgb = std::array<std::uint8_t, 3>;

// Paints a scene by evaluating a colour function at kSupersample^2 points per
// pixel and averaging; coordinates passed to `shade` are in [0,1]^2 with y
// pointing down.
template <typename Shade>
Image rasterize(const RenderSize& size, Shade&& shade) {
  std::vector<std::uint8_t> bytes(std::size_t(3) * size.height * size.width);
  const std::size_t plane = std::size_t(size.height) * size.width;
  for (int py = 0; py < size.height; ++py) {
    for (int px = 0; px < size.width; ++px) {
      std::array<int, 3> acc{0, 0, 0};
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const double u = (px + (sx + 0.5) / kSupersample) / size.width;
          const double v = (py + (sy + 0.5) / kSupersample) / size.height;
          const Rgb c = shade(u, v);
          for (int k = 0; k < 3; ++k) acc[k] += c[k];
        }
      }
      constexpr int n = kSupersample * kSupersample;
      for (int k = 0; k < 3; ++k) {
        bytes[k * plane + std::size_t(py) * size.width + px] = std::uint8_t((acc[k] + n / 2) / n);
      }
    }
  }
  return Image::from_bytes(size.height, size.width, 3, bytes);
}

// Distance from p to segment [a, b].
double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double t = std::clamp(((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

float clip_action(float a, int& clipped) {
  if (!(a >= -1.f && a <= 1.f)) {
    ++clipped;
    return std::isnan(a) ? 0.f : std::clamp(a, -1.f, 1.f);
  }
  return a;
}

}  // namespace

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  if (w >= kTwoPi) w = 0;
  return w;
}

double circular_distance(double u, double v) {
  const double d = std::fabs(wrap_angle(u) - wrap_angle(v));
  return std::min(d, kTwoPi - d);
}

ValveTurnEnv::ValveTurnEnv(ValveOptions opts) : opts_(opts) {
  if (opts.step_limit < 1) throw std::invalid_argument("valve step limit must be >= 1");
  if (!(opts.max_step > 0)) throw std::invalid_argument("valve max_step must be positive");
}

Image ValveTurnEnv::reset(Rng& rng) {
  if (opts_.reset == ValveReset::kRandom || !initialized_) theta_ = rng.uniform(0.0, kTwoPi);
  target_ = rng.uniform(0.0, kTwoPi);
  initialized_ = true;
  steps_ = 0;
  return render();
}

void ValveTurnEnv::set_state(double theta, double target) {
  theta_ = wrap_angle(theta);
  target_ = wrap_angle(target);
  initialized_ = true;
}

float ValveTurnEnv::oracle_action() const {
  double delta = wrap_angle(target_ - theta_);
  if (delta > std::numbers::pi) delta -= kTwoPi;
  return float(std::clamp(delta / opts_.max_step, -1.0, 1.0));
}

EnvStep ValveTurnEnv::step(std::span<const float> action) {
  if (action.size() != 1) throw std::invalid_argument("valve expects a 1-D action");
  int clipped = 0;
  const float a = clip_action(action[0], clipped);
  theta_ = wrap_angle(theta_ + double(a) * opts_.max_step);
  ++steps_;
  EnvStep out;
  // 0.0 - x keeps a zero distance at +0.0.
  out.r_ext = 0.0 - circular_distance(theta_, target_) / std::numbers::pi;
  out.done = steps_ >= opts_.step_limit;
  out.info["angle"] = theta_;
  out.info["target"] = target_;
  out.info["clipped_actions"] = clipped;
  out.observation = render();
  return out;
}

Image ValveTurnEnv::render() const {
  // Screen-space angles: counter-clockwise with y up.
  const double theta = wrap_angle(theta_);
  const double target = wrap_angle(target_);
  constexpr double cx = 0.5, cy = 0.5;
  constexpr double rim = 0.42, rim_width = 0.025, prong_len = 0.33, prong_half = 0.045, hub = 0.07;
  constexpr double marker = 0.06;
  std::array<std::array<double, 2>, 3> tips;
  for (int k = 0; k < 3; ++k) {
    const double a = theta + k * kTwoPi / 3.0;
    tips[k] = {cx + prong_len * std::cos(a), cy - prong_len * std::sin(a)};
  }
  const double mx = cx + rim * std::cos(target), my = cy - rim * std::sin(target);
  return rasterize(opts_.size, [&](double u, double v) -> Rgb {
    if (std::hypot(u - mx, v - my) <= marker) return {40, 200, 60};
    const double r = std::hypot(u - cx, v - cy);
    if (r <= hub) return {50, 50, 50};
    for (int k = 0; k < 3; ++k) {
      if (segment_distance(u, v, cx, cy, tips[k][0], tips[k][1]) <= prong_half) {
        return k == 0 ? Rgb{220, 60, 40} : Rgb{60, 90, 200};
      }
    }
    if (std::fabs(r - rim) <= rim_width) return {110, 110, 110};
    return {215, 215, 215};
  });
}

ReacherSparseEnv::ReacherSparseEnv(ReacherOptions opts) : opts_(opts) {
  if (opts.step_limit < 1) throw std::invalid_argument("reacher step limit must be >= 1");
  if (!(opts.goal_radius > 0 && opts.goal_radius < 0.5)) throw std::invalid_argument("goal radius must be in (0,0.5)");
}

Image ReacherSparseEnv::reset(Rng& rng) {
  x_ = 0.5;
  y_ = 0.5;
  gx_ = rng.uniform(opts_.goal_radius, 1.0 - opts_.goal_radius);
  gy_ = rng.uniform(opts_.goal_radius, 1.0 - opts_.goal_radius);
  steps_ = 0;
  return render();
}

void ReacherSparseEnv::set_state(double x, double y, double goal_x, double goal_y) {
  x_ = std::clamp(x, 0.0, 1.0);
  y_ = std::clamp(y, 0.0, 1.0);
  gx_ = goal_x;
  gy_ = goal_y;
}

bool ReacherSparseEnv::in_goal() const { return std::hypot(x_ - gx_, y_ - gy_) <= opts_.goal_radius; }

EnvStep ReacherSparseEnv::step(std::span<const float> action) {
  if (action.size() != 2) throw std::invalid_argument("reacher expects a 2-D action");
  int clipped = 0;
  const float ax = clip_action(action[0], clipped);
  const float ay = clip_action(action[1], clipped);
  x_ = std::clamp(x_ + double(ax) * opts_.max_speed, 0.0, 1.0);
  y_ = std::clamp(y_ + double(ay) * opts_.max_speed, 0.0, 1.0);
  ++steps_;
  EnvStep out;
  out.r_ext = in_goal() ? 1.0 : 0.0;
  out.done = steps_ >= opts_.step_limit;
  out.info["x"] = x_;
  out.info["y"] = y_;
  out.info["clipped_actions"] = clipped;
  out.observation = render();
  return out;
}

Image ReacherSparseEnv::render() const {
  return rasterize(opts_.size, [&](double u, double v) -> Rgb {
    // Position y grows upwards on screen.
    const double wy = 1.0 - v;
    if (std::hypot(u - x_, wy - y_) <= opts_.agent_radius) return {60, 110, 230};
    if (std::hypot(u - gx_, wy - gy_) <= opts_.goal_radius) return {220, 40, 40};
    return {30, 30, 30};
  });
}

}  // namespace nasa

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nasa/envs.hpp"
#include "nasa/harness/trainer.hpp"
#include "support.hpp"

using namespace nasa;

namespace {

constexpr double kPi = std::numbers::pi;

double l2_difference(const Image& a, const Image& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += double(a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

double valve_reward(double theta, double target) {
  ValveTurnEnv env;
  env.set_state(theta, target);
  const float zero = 0.f;
  return env.step({&zero, 1}).r_ext;
}

}  // namespace

TEST_CASE("valve reward cases") {
  CHECK(valve_reward(1.0, 1.0) == 0.0);
  CHECK(!std::signbit(valve_reward(1.0, 1.0)));
  CHECK(valve_reward(0.0, kPi) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(valve_reward(0.1, 6.2) == doctest::Approx(-(2 * kPi - 6.1) / kPi).epsilon(1e-12));
  CHECK(valve_reward(0.1, 6.2) == doctest::Approx(-0.0583).epsilon(1e-3));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double r = valve_reward(rng.uniform(-10, 10), rng.uniform(-10, 10));
    CHECK(r <= 0.0);
    CHECK(r >= -1.0);
  }
}

TEST_CASE("circular distance") {
  CHECK(circular_distance(0.1, 6.2) == doctest::Approx(0.1832).epsilon(1e-3));
  CHECK(circular_distance(-kPi / 2, 3 * kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wrap_angle(-0.5) == doctest::Approx(2 * kPi - 0.5));
  CHECK(wrap_angle(2 * kPi) == 0.0);
}

TEST_CASE("valve dynamics and episode length") {
  ValveOptions o;
  o.size = {24, 24};
  ValveTurnEnv env(o);
  Rng rng(2);
  env.reset(rng);
  CHECK(env.steps_taken() == 0);
  env.set_state(1.0, 2.0);
  const float a = 0.5f;
  auto st = env.step({&a, 1});
  CHECK(env.angle() == doctest::Approx(1.0 + 0.5 * o.max_step));
  CHECK(st.info["clipped_actions"] == 0);
  const float big = 3.f;
  st = env.step({&big, 1});
  CHECK(st.info["clipped_actions"] == 1);
  CHECK(env.angle() == doctest::Approx(1.0 + 1.5 * o.max_step));
  int steps = 2;
  while (!st.done) {
    st = env.step({&a, 1});
    ++steps;
  }
  CHECK(steps == 50);
  CHECK_THROWS(env.step(std::vector<float>{0.f, 0.f}));
}

TEST_CASE("hold mode keeps the angle across resets") {
  ValveOptions o;
  o.size = {16, 16};
  o.reset = ValveReset::kHold;
  ValveTurnEnv env(o);
  Rng rng(3);
  env.reset(rng);
  const float a = 0.7f;
  for (int i = 0; i < 10; ++i) env.step({&a, 1});
  const double before = env.angle();
  env.reset(rng);
  CHECK(env.angle() == before);
  CHECK(env.steps_taken() == 0);
}

TEST_CASE("random resets are uniform over the circle") {
  ValveOptions o;
  o.size = {8, 8};
  ValveTurnEnv env(o);
  Rng rng(4);
  const int n = 10000;
  std::vector<double> u;
  for (int i = 0; i < n; ++i) {
    env.reset(rng);
    u.push_back(env.angle() / (2 * kPi));
  }
  std::sort(u.begin(), u.end());
  double d = 0;
  for (int i = 0; i < n; ++i) d = std::max({d, (i + 1.0) / n - u[i], u[i] - double(i) / n});
  // 1% critical value of the one-sample KS statistic.
  CHECK(d < 1.628 / std::sqrt(double(n)));
}

TEST_CASE("valve rendering") {
  ValveOptions o;
  o.size = {32, 32};
  ValveTurnEnv e1(o), e2(o);
  e1.set_state(0.7, 2.0);
  e2.set_state(0.7, 2.0);
  CHECK(e1.render() == e2.render());
  e2.set_state(0.7 + 2 * kPi, 2.0);
  CHECK(e1.render() == e2.render());
  e1.set_state(0.0, 2.0);
  e2.set_state(kPi / 2, 2.0);
  CHECK(l2_difference(e1.render(), e2.render()) > 0.0);
  // The target marker is visible too.
  e2.set_state(0.0, 4.0);
  CHECK(l2_difference(e1.render(), e2.render()) > 0.0);
  const Image img = e1.render();
  CHECK(img.height() == 32);
  CHECK(img.channels() == 3);
}

TEST_CASE("greedy oracle solves the valve") {
  ValveOptions o;
  o.size = {8, 8};
  ValveTurnEnv env(o);
  Rng rng(5);
  const auto res = evaluate_policy(env, 200, 1, rng, [&](const FrameStack&) {
    return std::vector<float>{env.oracle_action()};
  });
  CHECK(res.mean_return > -2.0);
}

TEST_CASE("reacher reward, movement and clipping") {
  ReacherOptions o;
  o.size = {24, 24};
  ReacherSparseEnv env(o);
  Rng rng(6);
  env.reset(rng);
  CHECK(env.x() == 0.5);
  CHECK(env.steps_taken() == 0);
  CHECK(env.goal_x() >= o.goal_radius);
  CHECK(env.goal_x() <= 1 - o.goal_radius);
  env.set_state(0.5, 0.5, 0.9, 0.9);
  auto st = env.step(std::vector<float>{1.f, 0.f});
  CHECK(env.x() == doctest::Approx(0.55));
  CHECK(st.r_ext == 0.0);
  env.set_state(0.85, 0.9, 0.9, 0.9);
  st = env.step(std::vector<float>{0.f, 0.f});
  CHECK(st.r_ext == 1.0);
  st = env.step(std::vector<float>{2.f, -2.f});
  CHECK(st.info["clipped_actions"] == 2);
  env.set_state(0.99, 0.5, 0.2, 0.2);
  env.step(std::vector<float>{1.f, 0.f});
  CHECK(env.x() == 1.0);
}

TEST_CASE("reacher episodes last the step limit") {
  ReacherOptions o;
  o.size = {8, 8};
  ReacherSparseEnv env(o);
  Rng rng(7);
  env.reset(rng);
  int n = 0;
  bool done = false;
  while (!done) {
    done = env.step(std::vector<float>{0.f, 0.f}).done;
    ++n;
  }
  CHECK(n == 50);
}

TEST_CASE("reacher rendering shows agent and goal") {
  ReacherOptions o;
  o.size = {32, 32};
  ReacherSparseEnv a(o), b(o);
  a.set_state(0.3, 0.3, 0.7, 0.7);
  b.set_state(0.3, 0.3, 0.7, 0.7);
  CHECK(a.render() == b.render());
  b.set_state(0.6, 0.3, 0.7, 0.7);
  CHECK(l2_difference(a.render(), b.render()) > 0.0);
  b.set_state(0.3, 0.3, 0.2, 0.8);
  CHECK(l2_difference(a.render(), b.render()) > 0.0);
}

#include <doctest.h>

#include <cmath>

#include "nasa/replay.hpp"
#include "support.hpp"

using namespace nasa;

namespace {

// Transition i carries frames whose pixels encode i, so it can be recognised
// after a round trip through 8-bit storage.
Transition numbered(int i, int size = 6) {
  const float base = float(i % 200) / 255.f;
  const Image a(size, size, 3, base), b(size, size, 3, float(i % 200 + 1) / 255.f);
  Transition t;
  t.s = FrameStack({a, a, b});
  t.s_next = stack_push(t.s, b);
  t.a = {float(i % 7) / 7.f - 0.5f};
  t.breakdown = total_reward({1, 1}, -0.01 * i, 0.5, 0.25);
  t.r_total = t.breakdown.r_total;
  t.done = i % 5 == 4;
  return t;
}

int label(const Transition& t) { return int(std::lround(t.s.frame(0).at(0, 0, 0) * 255.f)); }

}  // namespace

TEST_CASE("push one item gives size one") {
  ReplayBuffer buf(4);
  CHECK(buf.empty());
  buf.push(numbered(0));
  CHECK(buf.size() == 1);
}

TEST_CASE("ring semantics drop the oldest item") {
  ReplayBuffer buf(5);
  for (int i = 0; i < 6; ++i) buf.push(numbered(i));
  CHECK(buf.size() == 5);
  CHECK(label(buf.at(0)) == 1);
  CHECK(label(buf.at(4)) == 5);
  for (int i = 6; i < 23; ++i) buf.push(numbered(i));
  CHECK(buf.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(label(buf.at(k)) == int(18 + k));
  CHECK_THROWS(buf.at(5));
}

TEST_CASE("stored items equal pushed items while under capacity") {
  ReplayBuffer buf(50);
  std::vector<Transition> pushed;
  for (int i = 0; i < 30; ++i) {
    pushed.push_back(numbered(i));
    buf.push(pushed.back());
  }
  for (std::size_t i = 0; i < pushed.size(); ++i) {
    const Transition t = buf.at(i);
    CHECK(t.s == pushed[i].s);
    CHECK(t.s_next == pushed[i].s_next);
    CHECK(t.a == pushed[i].a);
    CHECK(t.r_total == pushed[i].r_total);
    CHECK(t.breakdown == pushed[i].breakdown);
    CHECK(t.done == pushed[i].done);
  }
}

TEST_CASE("quantization error is at most half a level") {
  Rng rng(1);
  ReplayBuffer buf(2);
  Transition t;
  t.s = test::random_stack(8, 8, 3, rng);
  t.s_next = stack_push(t.s, test::random_image(8, 8, 3, rng));
  t.a = {0.f};
  buf.push(t);
  const Transition back = buf.at(0);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto x = t.s_next.frame(k).data(), y = back.s_next.frame(k).data();
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) <= 1.0f / 510.f + 1e-7f);
  }
}

TEST_CASE("consecutive transitions share frames") {
  ReplayBuffer buf(100);
  Rng rng(2);
  FrameStack s = stack_reset(test::random_image(8, 8, 3, rng), 3);
  for (int i = 0; i < 40; ++i) {
    Transition t;
    t.s = s;
    t.s_next = stack_push(s, test::random_image(8, 8, 3, rng));
    t.a = {0.1f};
    buf.push(t);
    s = t.s_next;
  }
  CHECK(buf.stored_frames() <= 41 + 3);
  CHECK(buf.pixel_bytes() == buf.stored_frames() * 8 * 8 * 3);
}

TEST_CASE("a one-item buffer yields copies under with-replacement sampling") {
  ReplayBuffer buf(4);
  buf.push(numbered(3));
  Rng rng(3);
  const Batch b = buf.sample(3, rng);
  CHECK(b.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(b.obs[std::size_t(i) * b.obs.row_size()] == b.obs[0]);
    CHECK(b.rewards[i] == b.rewards[0]);
  }
}

TEST_CASE("same seed gives the same indices") {
  ReplayBuffer buf(20);
  for (int i = 0; i < 20; ++i) buf.push(numbered(i));
  Rng a(9), b(9);
  CHECK(buf.sample_indices(64, a) == buf.sample_indices(64, b));
}

TEST_CASE("sampling frequencies are uniform") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(numbered(i));
  Rng rng(4);
  std::vector<long> counts(10, 0);
  const long n = 1000000;
  for (std::size_t idx : buf.sample_indices(std::size_t(n), rng)) ++counts.at(idx);
  const double expected = double(n) / 10, sigma = std::sqrt(n * 0.1 * 0.9);
  double chi2 = 0;
  for (long c : counts) {
    CHECK(std::abs(double(c) - expected) < 3 * sigma);
    chi2 += (double(c) - expected) * (double(c) - expected) / expected;
  }
  // Upper 1% point of chi-square with 9 degrees of freedom.
  CHECK(chi2 < 21.666);
}

TEST_CASE("batch layout") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(numbered(i));
  const Batch b = buf.gather({2, 7});
  CHECK(b.obs.shape() == nn::Shape{2, 9, 6, 6});
  CHECK(b.next_obs.shape() == nn::Shape{2, 9, 6, 6});
  CHECK(b.actions.shape() == nn::Shape{2, 1});
  CHECK(b.rewards.shape() == nn::Shape{2, 1});
  CHECK(b.done.shape() == nn::Shape{2, 1});
  CHECK(b.rewards[0] == float(numbered(2).r_total));
  CHECK(b.done[0] == 0.f);
  CHECK(b.done[1] == 0.f);
  CHECK(buf.gather({4}).done[0] == 1.f);
  CHECK(b.actions[1] == numbered(7).a[0]);
}

TEST_CASE("replay input validation") {
  CHECK_THROWS(ReplayBuffer(0));
  ReplayBuffer buf(3);
  Rng rng(1);
  CHECK_THROWS(buf.sample(1, rng));
  Transition t = numbered(0);
  t.a = {1.5f};
  CHECK_THROWS(buf.push(t));
  buf.push(numbered(0));
  CHECK_THROWS(buf.push(numbered(1, 8)));
  CHECK_THROWS(buf.gather({3}));
}

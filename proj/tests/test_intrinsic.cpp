#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nasa/intrinsic.hpp"
#include "support.hpp"

using namespace nasa;

namespace {

PredictorConfig small_predictor(int members = 3, int z = 6, int a = 2) {
  PredictorConfig p;
  p.z_dim = z;
  p.action_dim = a;
  p.hidden = 32;
  p.members = members;
  return p;
}

AutoencoderConfig small_ae() {
  AutoencoderConfig c;
  c.obs.height = c.obs.width = 16;
  c.z_dim = 16;
  c.filters = 8;
  return c;
}

}  // namespace

TEST_CASE("reward composition arithmetic") {
  const auto b = total_reward({1, 1}, 0.5, 0.2, 0.3);
  CHECK(b.r_total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.r_ext == 0.5);
  CHECK(b.r_novel == 0.2);
  CHECK(b.r_surprise == 0.3);

  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.uniform(-1, 1), n = rng.uniform(0, 1), s = rng.uniform(0, 3);
    CHECK(total_reward({0, 0}, e, n, s).r_total == e);
    CHECK(total_reward({1, 0}, e, n, s).r_total == e + n);
    const double a = rng.uniform(0, 2), bb = rng.uniform(0, 2);
    CHECK(total_reward({a, bb}, e, n, s).r_total == e + a * n + bb * s);
  }
  CHECK_THROWS(total_reward({-1, 0}, 0, 0, 0));
  CHECK_THROWS(total_reward({0, -0.1}, 0, 0, 0));
}

TEST_CASE("novelty of a perfect reconstruction is zero") {
  Rng rng(2);
  const FrameStack s = test::random_stack(16, 16, 3, rng);
  CHECK(novelty_from_reconstruction(s, to_tensor(s)) == 0.0);
}

TEST_CASE("novelty of an untrained autoencoder on a structured image is in (0,2]") {
  Rng rng(3);
  Autoencoder ae(small_ae(), rng);
  const FrameStack s = stack_reset(test::blob_image(16, 16, 0.3, 0.3), 3);
  const double n = novelty_reward(ae, s, {}, false);
  CHECK(n > 0.0);
  CHECK(n <= 2.0);
  const double clamped = novelty_reward(ae, s);
  CHECK(clamped >= 0.0);
  CHECK(clamped <= 1.0);
}

TEST_CASE("clamping bounds novelty for anticorrelated reconstructions") {
  Image a(8, 8, 3), b(8, 8, 3);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        a.at(c, y, x) = float((x + y) % 2);
        b.at(c, y, x) = 1.f - a.at(c, y, x);
      }
  const FrameStack s = stack_reset(a, 1);
  const auto rec = to_tensor(stack_reset(b, 1));
  CHECK(novelty_from_reconstruction(s, rec, {}, false) > 1.0);
  CHECK(novelty_from_reconstruction(s, rec, {}, true) == 1.0);
}

TEST_CASE("training the autoencoder lowers mean novelty on its training set") {
  Rng rng(4);
  Autoencoder ae(small_ae(), rng);
  std::vector<FrameStack> set;
  for (int i = 0; i < 6; ++i) set.push_back(stack_reset(test::blob_image(16, 16, 0.25 + 0.1 * i, 0.5), 3));
  auto mean_novelty = [&] {
    double s = 0;
    for (const auto& f : set) s += novelty_reward(ae, f);
    return s / double(set.size());
  };
  const double before = mean_novelty();
  const auto x = to_batch(set);
  for (int i = 0; i < 400; ++i) ae.update(x);
  CHECK(mean_novelty() < before);
}

TEST_CASE("surprise is zero when the ensemble mean is exact") {
  Rng rng(5);
  PredictorEnsemble ens(small_predictor(), rng);
  const Latent z{0.1f, -0.2f, 0.3f, 0.f, 0.5f, -0.5f};
  const std::vector<float> a{0.2f, -0.7f};
  CHECK(surprise_reward(ens, z, a, ens.predict(z, a)) == 0.0);
}

TEST_CASE("constant offset c on every component gives c squared") {
  Rng rng(6);
  PredictorEnsemble ens(small_predictor(), rng);
  const Latent z{0.1f, -0.2f, 0.3f, 0.f, 0.5f, -0.5f};
  const std::vector<float> a{0.2f, -0.7f};
  const Latent pred = ens.predict(z, a);
  for (double c : {0.25, -0.5, 0.125}) {
    Latent next = pred;
    for (auto& v : next) v = float(double(v) + c);
    double expected = 0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double d = double(next[i]) - double(pred[i]);
      expected += d * d;
    }
    expected /= double(next.size());
    CHECK(surprise_reward(ens, z, a, next) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(surprise_reward(ens, z, a, next) == doctest::Approx(c * c).epsilon(1e-5));
  }
}

TEST_CASE("a one-member ensemble equals its single predictor") {
  Rng rng(7);
  PredictorEnsemble ens(small_predictor(1), rng);
  const Latent z{0.1f, -0.2f, 0.3f, 0.f, 0.5f, -0.5f};
  const std::vector<float> a{0.2f, -0.7f};
  nn::Tensor<float> in({1, 8});
  std::copy(z.begin(), z.end(), in.data());
  std::copy(a.begin(), a.end(), in.data() + 6);
  CHECK(ens.predict(z, a) == ens.member(0).infer(in).values());
}

TEST_CASE("mean prediction does not depend on member order") {
  Rng rng(8);
  PredictorEnsemble ens(small_predictor(5), rng);
  const Latent z{0.1f, -0.2f, 0.3f, 0.f, 0.5f, -0.5f}, next{0.f, 0.f, 0.1f, 0.2f, 0.3f, 0.4f};
  const std::vector<float> a{0.2f, -0.7f};
  const double s0 = surprise_reward(ens, z, a, next);
  const Latent p0 = ens.predict(z, a);
  const std::vector<std::size_t> order{3, 0, 4, 2, 1};
  ens.permute(order);
  CHECK(ens.predict(z, a) == p0);
  CHECK(surprise_reward(ens, z, a, next) == s0);
}

TEST_CASE("members are independent and shaped alike") {
  Rng rng(9);
  PredictorEnsemble ens(small_predictor(3), rng);
  CHECK(ens.size() == 3);
  CHECK(ens.member(0).param_hash() != ens.member(1).param_hash());
  CHECK(ens.member(1).param_hash() != ens.member(2).param_hash());
  for (std::size_t m = 0; m < 3; ++m) CHECK(ens.member(m).output_sample_shape() == nn::Shape{6});
}

TEST_CASE("ensemble learns fixed linear dynamics") {
  Rng rng(10);
  auto cfg = small_predictor(3, 4, 2);
  cfg.hidden = 64;
  PredictorEnsemble ens(cfg, rng);
  const int n = 64;
  const double A[4][4] = {{0.9, 0.1, 0, 0}, {0, 0.8, 0.2, 0}, {0.1, 0, 0.7, 0}, {0, 0, 0.3, 0.6}};
  const double B[4][2] = {{0.5, 0}, {0, 0.5}, {0.2, -0.2}, {-0.3, 0.1}};
  nn::Tensor<float> z({n, 4}), a({n, 2}), zn({n, 4});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) z[std::size_t(i) * 4 + j] = float(rng.uniform(-1, 1));
    for (int j = 0; j < 2; ++j) a[std::size_t(i) * 2 + j] = float(rng.uniform(-1, 1));
    for (int r = 0; r < 4; ++r) {
      double v = 0;
      for (int j = 0; j < 4; ++j) v += A[r][j] * z[std::size_t(i) * 4 + j];
      for (int j = 0; j < 2; ++j) v += B[r][j] * a[std::size_t(i) * 2 + j];
      zn[std::size_t(i) * 4 + r] = float(v);
    }
  }
  const double initial = ens.update(z, a, zn);
  double loss = initial;
  for (int i = 0; i < 3000; ++i) {
    loss = ens.update(z, a, zn);
    REQUIRE(loss >= 0.0);
  }
  INFO("initial ", initial, " final ", loss);
  CHECK(loss < 0.01 * initial);
}

TEST_CASE("surprise input validation") {
  Rng rng(11);
  PredictorEnsemble ens(small_predictor(), rng);
  const std::vector<float> a{0.f, 0.f};
  CHECK_THROWS(surprise_reward(ens, Latent(5), a, Latent(6)));
  CHECK_THROWS(surprise_reward(ens, Latent(6), std::vector<float>{0.f}, Latent(6)));
}

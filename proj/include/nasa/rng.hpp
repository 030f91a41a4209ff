#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace nasa {

// Seeded random stream. Distributions are implemented here rather than taken
// from <random> so that sequences are identical across standard libraries and
// the full state round-trips through save_state/load_state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller; no cached second variate.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::string save_state() const;
  void load_state(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Derives independent named streams from one master seed, so adding a new
// consumer never perturbs the sequences seen by existing ones.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed) : master_(master_seed) {}
  Rng stream(std::string_view name) const;
  std::uint64_t master_seed() const { return master_; }

 private:
  std::uint64_t master_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nasa

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace campus {

// The standard <random> distributions are implementation-defined, so sampling
// is done by hand to keep byte-identical reruns independent of the toolchain.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent substream for a (seed, tag) pair.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed;
  splitmix64(state);
  state ^= 0xD1B54A32D192ED03ULL * (tag + 1);
  return splitmix64(state);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform in [0, 1).
  double u01() { return (eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, two uniforms per call (no cached spare,
  // so the draw count per call is fixed).
  double normal() {
    const double u1 = ((eng_() >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
    const double u2 = (eng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [lo, hi], rejection sampled.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = range * (UINT64_MAX / range);
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return lo + static_cast<std::int64_t>(v % range);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace campus

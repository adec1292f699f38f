#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace uavmm {

// One splitmix64 step. Used both as the sub-seed mixing function and to
// spread user seeds before feeding the engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable sub-seed derivation: chain each salt through splitmix64. Sweeps and
// per-entity streams use this so results do not depend on execution order.
inline std::uint64_t derive_seed(std::uint64_t seed) {
  std::uint64_t s = seed;
  return splitmix64(s);
}

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, Rest... rest) {
  std::uint64_t s = seed ^ (salt + 0x9e3779b97f4a7c15ULL);
  return derive_seed(splitmix64(s), rest...);
}

// Deterministic RNG stream. std::mt19937_64 output is fully specified by the
// standard; distributions are hand-rolled here because the std ones are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(derive_seed(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  }

  // Box-Muller; the spare value is cached so draws come in a fixed order.
  double normal(double mean, double sigma) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sigma * spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + sigma * r * std::cos(theta);
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uavmm

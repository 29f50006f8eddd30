#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "ednet/errors.hpp"

namespace ednet {

/// splitmix64 step; used both as a standalone mixer and to expand seeds.
inline std::uint64_t split_mix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Collapses (seed, tag, index, ...) tuples into one substream seed.
/// Used everywhere a keyed, order-independent RNG substream is needed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t state = 0x243f6a8885a308d3ULL;  // pi fraction, arbitrary nonzero
  for (std::uint64_t p : parts) {
    state ^= p + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
    (void)split_mix64(state);
  }
  std::uint64_t s = state;
  return split_mix64(s);
}

/// Deterministic, platform-independent generator (xoshiro256**) with the
/// handful of variate kinds this project needs. Distribution code is local
/// so that streams are reproducible bit-for-bit across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = split_mix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two uniforms per call so the
  /// stream position does not depend on hidden cached state.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard; prob 2^-53 per draw
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Exact Poisson sampling by multiplicative inversion (Knuth), split into
  /// chunks so exp(-mean) stays within double range for large means.
  std::int64_t poisson(double mean) {
    if (std::isnan(mean) || mean < 0.0 || !std::isfinite(mean))
      throw InvalidRate("poisson: rate must be finite and nonnegative");
    std::int64_t total = 0;
    while (mean > 500.0) {
      total += poisson_chunk(500.0);
      mean -= 500.0;
    }
    if (mean > 0.0) total += poisson_chunk(mean);
    return total;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::int64_t poisson_chunk(double mean) {
    const double threshold = std::exp(-mean);
    std::int64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > threshold);
    return k - 1;
  }

  std::uint64_t state_[4];
};

/// Fixed-order pairwise (tree) summation. Keeps accumulation independent of
/// how the work that produced the terms was scheduled.
inline double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace ednet

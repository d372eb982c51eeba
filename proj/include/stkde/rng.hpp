#pragma once

#include "stkde/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace stkde {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stateless sub-stream seed for replicate `index` of a run seeded with
/// `master`. Replicates drawn from sub-seeds are independent of the order or
/// parallel schedule in which they run.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

/// Deterministic random stream. All conversions from raw engine output are
/// spelled out here rather than taken from <random> distributions, whose
/// algorithms are implementation-defined; outputs are reproducible for a
/// given seed on any conforming platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  Scalar uniform() { return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53; }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n) {
    const auto v = static_cast<std::uint64_t>(uniform() * static_cast<Scalar>(n));
    return v < n ? v : n - 1;
  }

  /// Standard normal via Box-Muller.
  Scalar normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const Scalar u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const Scalar u2 = uniform();
    const Scalar r = std::sqrt(-2.0 * std::log(u1));
    const Scalar a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Poisson count by Knuth's product-of-uniforms method, with recursive
  /// halving so large means never underflow exp(-mean).
  std::int64_t poisson(Scalar mean) {
    if (mean <= 0) return 0;
    if (mean > 30.0) {
      const Scalar half = mean * 0.5;
      return poisson(half) + poisson(mean - half);
    }
    const Scalar limit = std::exp(-mean);
    std::int64_t k = 0;
    Scalar p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  Scalar spare_ = 0;
};

}  // namespace stkde

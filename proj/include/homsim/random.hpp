#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "homsim/errors.hpp"

namespace homsim {

/// Seeded random source with a bit-stable stream: the mt19937_64 engine is
/// fully specified by the standard, and uniforms are built from fixed bit
/// operations, so the same seed reproduces the same counts everywhere.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Exact Poisson sampling, valid for any mean. Knuth's inversion by
  /// uniform products, applied to chunks of mean <= 30 and summed; the
  /// Poisson distribution is additive so the result is exact and avoids
  /// exp(-lambda) underflow for large means.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0)) throw ValidationError("poisson: mean must be >= 0");
    std::uint64_t total = 0;
    constexpr double kChunk = 30.0;
    while (mean > kChunk) {
      total += poisson_knuth(kChunk);
      mean -= kChunk;
    }
    return total + poisson_knuth(mean);
  }

private:
  std::uint64_t poisson_knuth(double mean) {
    if (mean == 0) return 0;
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  std::mt19937_64 engine_;
};

}  // namespace homsim

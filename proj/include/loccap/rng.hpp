#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace loccap {

/// Seedable generator whose output is identical on every platform.
///
/// The engine is std::mt19937_64, whose sequence the standard fixes exactly.
/// The std:: distributions are implementation-defined, so every variate is
/// derived here by hand:
///  - uniform01: top 53 bits of one engine draw, scaled by 2^-53, in [0, 1);
///  - exponential: -log(1 - uniform01);
///  - poisson(mean): count of unit-rate exponential arrivals before `mean`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential() { return -std::log1p(-uniform01()); }

  /// Linear in `mean`; the emitter counts used here stay below ~10^6.
  std::uint64_t poisson(double mean) {
    std::uint64_t n = 0;
    double t = exponential();
    while (t < mean) {
      ++n;
      t += exponential();
    }
    return n;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace loccap

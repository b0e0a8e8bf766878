#ifndef ORBITSUM_RNG_HPP
#define ORBITSUM_RNG_HPP

#include <random>

#include "orbitsum/common.hpp"

namespace orbitsum {

/// Deterministic draws on top of std::mt19937_64. The bounded samplers are
/// hand-rolled (rejection from raw engine words) because the standard
/// distributions are not specified bit-for-bit across implementations.
class Rng {
 public:
  explicit Rng(u64 seed) : eng_(seed) {}

  u64 next() { return eng_(); }

  /// Uniform in [lo, hi], inclusive.
  u64 uniform(u64 lo, u64 hi) {
    if (lo > hi) throw OutOfRange("uniform: lo > hi");
    u64 span = hi - lo + 1;
    if (span == 0) return eng_();  // full 64-bit range
    u64 limit = ~u64(0) - ~u64(0) % span;
    u64 x;
    do {
      x = eng_();
    } while (x >= limit);
    return lo + x % span;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace orbitsum

#endif  // ORBITSUM_RNG_HPP

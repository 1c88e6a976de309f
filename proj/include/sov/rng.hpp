// Deterministic pseudo-random draws; every suite seeds from (masterSeed, checkId)
// so reports are reproducible bit-for-bit.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sov/scalar.hpp"

namespace sov {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  /// Derive a child stream from a master seed and a textual check id.
  static Rng from(std::uint64_t master, const std::string& check_id) {
    std::uint64_t h = master ^ 0xcbf29ce484222325ull;
    for (unsigned char c : check_id) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    return Rng(h);
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 bits, identical across platforms.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  long intval(long lo, long hi) {
    return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Cplx complex_in_disc(double radius) {
    while (true) {
      double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) return Cplx(radius * x, radius * y);
    }
  }

  /// Small rational with numerator in [-num_max, num_max] and denominator in [1, den_max].
  Rat rational(long num_max = 12, long den_max = 4) {
    Rat r(intval(-num_max, num_max), intval(1, den_max));
    r.canonicalize();
    return r;
  }

  Rat nonzero_rational(long num_max = 12, long den_max = 4) {
    while (true) {
      Rat r = rational(num_max, den_max);
      if (r != 0) return r;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace sov

#pragma once

#include <limits>
#include <random>

#include "shorlab/common.hpp"

namespace shorlab {

/*
 * Seeded random source. Wraps mt19937_64 (whose output sequence is fixed by
 * the standard) and remembers its seed so run records can be replayed
 * byte-for-byte on any platform. One source per run / per worker; derived
 * streams come from spawn().
 */
class Rng {
 public:
  explicit Rng(u64 seed) : seed_(seed), engine_(seed) {}

  u64 seed() const { return seed_; }

  u64 next_u64() { return engine_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // exactly uniform over [0, bound) via rejection
  u64 uniform_below(u64 bound) {
    if (bound <= 1) return 0;
    const u64 rem = (std::numeric_limits<u64>::max() % bound + 1) % bound;  // 2^64 mod bound
    const u64 limit = 0 - rem;  // largest multiple of bound, wrapped
    u64 v;
    do {
      v = next_u64();
    } while (limit != 0 && v >= limit);
    return v % bound;
  }

  bool flip(double p) { return uniform_unit() < p; }

  Rng spawn(u64 stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  u64 seed_;
  std::mt19937_64 engine_;
};

}  // namespace shorlab

#pragma once

#include <cstdint>
#include <vector>

namespace shorlab {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline constexpr double kPi = 3.14159265358979323846;

// a*b mod m without overflow for m < 2^64
inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

// Mixing function used to derive independent seeds from a base seed.
inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline u64 derive_seed(u64 base, u64 stream) {
  return splitmix64(base ^ splitmix64(stream));
}

// All divisors of v, ascending. v >= 1.
inline std::vector<u64> divisors_of(u64 v) {
  std::vector<u64> low;
  std::vector<u64> high;
  for (u64 d = 1; d * d <= v; ++d) {
    if (v % d == 0) {
      low.push_back(d);
      if (d != v / d) high.push_back(v / d);
    }
  }
  for (auto it = high.rbegin(); it != high.rend(); ++it) low.push_back(*it);
  return low;
}

}  // namespace shorlab

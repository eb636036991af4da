#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shorlab/common.hpp"

/*
 * Classical number theory behind order finding: modular exponentiation, the
 * brute-force order oracle, period inference from measured values, and factor
 * extraction from an even period.
 *
 * Width policy: plain 64-bit values with 128-bit intermediates, exact for
 * N up to ~2^30 and register sizes M up to ~2^61.
 */
namespace shorlab::numtheory {

// A^x mod N by square and multiply. N >= 2. O(log x) multiplications.
inline u64 mod_pow(u64 a, u64 x, u64 n) {
  if (n < 2) throw std::invalid_argument("mod_pow: modulus must be >= 2");
  u64 result = 1 % n;
  u64 base = a % n;
  while (x > 0) {
    if (x & 1) result = mulmod(result, base, n);
    base = mulmod(base, base, n);
    x >>= 1;
  }
  return result;
}

// Smallest r >= 1 with A^r = 1 (mod N), by brute-force iteration.
// This is the independent oracle the simulated pipelines are validated
// against, so it stays deliberately naive.
inline u64 multiplicative_order(u64 a, u64 n) {
  if (n < 2) throw std::invalid_argument("multiplicative_order: modulus must be >= 2");
  const u64 a0 = a % n;
  if (std::gcd(a0, n) != 1) {
    throw std::invalid_argument("multiplicative_order: arguments must be coprime");
  }
  if (a0 == 1) return 1;
  u64 value = a0;
  u64 r = 1;
  while (value != 1) {
    value = mulmod(value, a0, n);
    ++r;
  }
  return r;
}

// The factoring instance (N, A). gcd(A, N) = 1 is a construction invariant;
// a nontrivial gcd is an immediate factor, not an instance (see make_instance).
struct FactoringInstance {
  u64 N;
  u64 A;

  FactoringInstance(u64 N_, u64 A_) : N(N_), A(A_) {
    if (N < 3 || N % 2 == 0) {
      throw std::invalid_argument("FactoringInstance: N must be an odd integer >= 3");
    }
    if (A <= 1 || A >= N) {
      throw std::invalid_argument("FactoringInstance: A must satisfy 1 < A < N");
    }
    if (std::gcd(A, N) != 1) {
      throw std::invalid_argument("FactoringInstance: gcd(A, N) must be 1");
    }
  }
};

struct ImmediateFactor {
  u64 factor;
  u64 cofactor;
};

// gcd(A, N) > 1 trivially factors N, so it is reported as a result rather
// than rejected.
inline std::variant<FactoringInstance, ImmediateFactor> make_instance(u64 N, u64 A) {
  if (N < 3 || N % 2 == 0) {
    throw std::invalid_argument("make_instance: N must be an odd integer >= 3");
  }
  if (A <= 1 || A >= N) {
    throw std::invalid_argument("make_instance: A must satisfy 1 < A < N");
  }
  const u64 g = std::gcd(A, N);
  if (g != 1) return ImmediateFactor{g, N / g};
  return FactoringInstance(N, A);
}

enum class CandidateSource { exact_divisor, continued_fraction, gcd_of_samples, bit_count };

inline const char* to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::exact_divisor: return "exact_divisor";
    case CandidateSource::continued_fraction: return "continued_fraction";
    case CandidateSource::gcd_of_samples: return "gcd_of_samples";
    case CandidateSource::bit_count: return "bit_count";
  }
  return "?";
}

struct PeriodCandidate {
  u64 r;
  CandidateSource source;
  u64 sample;  // the measured value it was derived from
};

enum class FactorFailure { odd_period, trivial_root, not_a_period };

inline const char* to_string(FactorFailure f) {
  switch (f) {
    case FactorFailure::odd_period: return "odd_period";
    case FactorFailure::trivial_root: return "trivial_root";
    case FactorFailure::not_a_period: return "not_a_period";
  }
  return "?";
}

struct FactorOutcome {
  std::optional<std::pair<u64, u64>> factors;
  std::optional<FactorFailure> failure;

  bool ok() const { return factors.has_value(); }
};

/*
 * Factor extraction from a period candidate: for even r with A^(r/2) not a
 * trivial square root of 1, gcd(A^(r/2) -+ 1, N) are both nontrivial divisors
 * of N. Candidates are not assumed minimal or even valid: a wrong candidate
 * fails as not_a_period, and a non-minimal even candidate can reach
 * A^(r/2) = +1, which yields gcds {N, 1} and is reported as trivial_root
 * alongside the -1 case.
 */
inline FactorOutcome extract_factors(u64 a, u64 r, u64 n) {
  if (n < 3) throw std::invalid_argument("extract_factors: N must be >= 3");
  if (r == 0) throw std::invalid_argument("extract_factors: r must be >= 1");
  if (mod_pow(a, r, n) != 1) return {std::nullopt, FactorFailure::not_a_period};
  if (r % 2 != 0) return {std::nullopt, FactorFailure::odd_period};
  const u64 root = mod_pow(a, r / 2, n);
  if (root == n - 1 || root == 1) return {std::nullopt, FactorFailure::trivial_root};
  const u64 g1 = std::gcd(root - 1, n);
  const u64 g2 = std::gcd(root + 1, n);
  return {std::make_pair(g1, g2), std::nullopt};
}

/*
 * Period candidates from a measured input-register value c with M = 2^n
 * points. Two rules, deduplicated and sorted ascending:
 *   (a) exact-divisor: every r = lambda*M/c that is an integer <= N, i.e.
 *       the multiples of M/gcd(c, M);
 *   (b) every convergent denominator <= N of the continued fraction of c/M.
 * c = 0 carries no period information and yields an empty list.
 */
inline std::vector<PeriodCandidate> infer_period(u64 c, u64 M, u64 N) {
  if (c >= M) throw std::invalid_argument("infer_period: require 0 <= c < M");
  std::vector<PeriodCandidate> out;
  if (c == 0) return out;

  std::set<u64> seen;
  const u64 step = M / std::gcd(c, M);
  for (u64 r = step; r <= N; r += step) {
    out.push_back({r, CandidateSource::exact_divisor, c});
    seen.insert(r);
  }

  // convergent denominators k_i = a_i*k_{i-1} + k_{i-2} of c/M;
  // every k_i <= M, so the recurrence cannot overflow
  u64 num = c, den = M;
  u64 km1 = 0, km2 = 1;  // k_{i-1}, k_{i-2}
  while (den != 0) {
    const u64 a = num / den;
    const u64 k = a * km1 + km2;
    if (k > N) break;
    if (seen.insert(k).second) {
      out.push_back({k, CandidateSource::continued_fraction, c});
    }
    km2 = km1;
    km1 = k;
    const u64 rem = num % den;
    num = den;
    den = rem;
  }

  std::sort(out.begin(), out.end(), [](const PeriodCandidate& x, const PeriodCandidate& y) {
    return x.r < y.r;
  });
  return out;
}

// Smallest n with 2^n >= N^2; the standard input-register sizing rule.
inline int register_size_for(u64 N) {
  if (N < 3) throw std::invalid_argument("register_size_for: N must be >= 3");
  if (N > (u64{1} << 30)) {
    throw std::invalid_argument("register_size_for: N above 2^30 exceeds the 64-bit register budget");
  }
  const u128 square = static_cast<u128>(N) * N;
  int n = 1;
  while ((static_cast<u128>(1) << n) < square) ++n;
  // the smallest such n always lands below 2*N^2
  if (!((static_cast<u128>(1) << n) < 2 * square)) {
    throw std::logic_error("register_size_for: sizing bound violated");
  }
  return n;
}

// Total-qubit estimate 7s + 1 for an s-bit modulus (reporting only).
inline u64 qubit_budget(u64 s) {
  if (s < 1) throw std::invalid_argument("qubit_budget: s must be >= 1");
  return 7 * s + 1;
}

}  // namespace shorlab::numtheory

#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shorlab/common.hpp"
#include "shorlab/numtheory.hpp"
#include "shorlab/rng.hpp"

/*
 * Exact register-state simulation without dense vectors.
 *
 * After modular exponentiation the joint state is a sum of r arithmetic
 * progressions ("branches"), one per residue A^l mod N; that structure is
 * stored directly in O(r). The post-QFT outcome distribution follows from
 * the geometric-series closed form per branch, evaluable pointwise in O(1),
 * so nothing of size 2^n is ever materialized on the main path. A capped
 * dense expansion exists purely as a validation surface.
 */
namespace shorlab::qstate {

inline constexpr int kDenseCap = 12;                      // max n for dense dumps
inline constexpr u64 kMaterializeCap = u64{1} << 20;      // max M for full mass tables
inline constexpr double kSupportThreshold = 1e-12;        // mass cutoff for support sets
inline constexpr int kMaxInputQubits = 61;                // keeps M and 2*M inside u64

struct Problem {
  numtheory::FactoringInstance instance;
  int n;   // input register qubits
  int m;   // output register qubits
  u64 M;   // 2^n
};

inline int output_bits_for(u64 N) {
  int m = 1;
  while ((u64{1} << m) <= N) ++m;
  return m;
}

inline Problem make_problem(const numtheory::FactoringInstance& instance,
                            std::optional<int> n_override = std::nullopt,
                            std::optional<int> m_override = std::nullopt) {
  const int n = n_override.value_or(numtheory::register_size_for(instance.N));
  const int m = m_override.value_or(output_bits_for(instance.N));
  if (n < 1 || n > kMaxInputQubits) {
    throw std::invalid_argument("make_problem: input register must have 1..61 qubits");
  }
  if (m < 1 || (m < 64 && (u64{1} << m) <= instance.N)) {
    throw std::invalid_argument("make_problem: output register cannot hold all residues");
  }
  return Problem{instance, n, m, u64{1} << n};
}

// (1/sqrt(M)) sum_j |j>|0>. Structural: O(1) storage.
struct UniformState {
  Problem problem;

  u64 count() const { return problem.M; }
  double amplitude() const { return 1.0 / std::sqrt(static_cast<double>(problem.M)); }
};

inline UniformState prepare_uniform(const Problem& problem) { return UniformState{problem}; }

struct Branch {
  u64 offset;   // l
  u64 count;    // s_l + 1 elements: l, l+r, ..., s_l*r + l  (0 when l >= M)
  u64 residue;  // A^l mod N
};

// The branch decomposition of the post-modexp state.
struct PeriodicState {
  u64 M = 0;
  u64 r = 0;
  u64 N = 0;
  u64 A = 0;
  std::vector<Branch> branches;  // indexed by l in [0, r)
};

inline PeriodicState apply_modexp(const UniformState& uniform) {
  const Problem& pr = uniform.problem;
  PeriodicState state;
  state.M = pr.M;
  state.N = pr.instance.N;
  state.A = pr.instance.A;
  state.r = numtheory::multiplicative_order(pr.instance.A, pr.instance.N);
  state.branches.reserve(state.r);
  u64 residue = 1;
  for (u64 l = 0; l < state.r; ++l) {
    const u64 count = l < state.M ? (state.M - 1 - l) / state.r + 1 : 0;
    state.branches.push_back({l, count, residue});
    residue = mulmod(residue, pr.instance.A, pr.instance.N);
  }
  return state;
}

namespace detail {

// |sum_{q=0}^{count-1} e^{2 pi i p q r / M}|^2 via the geometric closed form.
// All angle reductions are exact integer arithmetic mod 2M, so peaks
// (p*r = 0 mod M -> count^2) and true zeros come out exact.
inline double branch_power(u64 p, u64 r, u64 M, u64 count) {
  if (count == 0) return 0.0;
  const u64 two_m = 2 * M;
  const u64 step = static_cast<u64>(static_cast<u128>(p) * r % two_m);
  if (step % M == 0) return static_cast<double>(count) * static_cast<double>(count);
  const u64 sweep = static_cast<u64>(static_cast<u128>(step) * count % two_m);
  if (sweep % M == 0) return 0.0;
  const double num = std::sin(kPi * static_cast<double>(sweep) / static_cast<double>(M));
  const double den = std::sin(kPi * static_cast<double>(step) / static_cast<double>(M));
  const double ratio = num / den;
  return ratio * ratio;
}

// e^{2 pi i t / M} for an exact integer phase t in [0, M)
inline std::complex<double> unit_phase(u64 t, u64 M) {
  const double angle = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(M);
  return {std::cos(angle), std::sin(angle)};
}

// sum_{q=0}^{count-1} e^{2 pi i p q r / M} as a complex value
inline std::complex<double> branch_sum(u64 p, u64 r, u64 M, u64 count) {
  if (count == 0) return {0.0, 0.0};
  const u64 step = static_cast<u64>(static_cast<u128>(p) * r % M);
  if (step == 0) return {static_cast<double>(count), 0.0};
  const u64 sweep = static_cast<u64>(static_cast<u128>(step) * count % M);
  const std::complex<double> one{1.0, 0.0};
  return (one - unit_phase(sweep, M)) / (one - unit_phase(step, M));
}

}  // namespace detail

/*
 * Exact outcome distribution of the input register after the QFT.
 *
 * P(p) = (1/M^2) * sum_l |G_l(p)|^2 with G_l the branch geometric sum. The
 * branch counts take at most two values (floor/ceil of M/r), so pointwise
 * evaluation is O(1). When r divides M the distribution is exactly r peaks
 * of mass 1/r at the multiples of M/r and sampling never needs a table;
 * otherwise sampling and support enumeration materialize the mass table,
 * which is only permitted up to M = 2^20 (the declared experiment cap).
 */
class Distribution {
 public:
  Distribution(u64 M, u64 r) : M_(M), r_(r) {
    if (M_ < 2 || r_ < 1) throw std::invalid_argument("Distribution: need M >= 2 and r >= 1");
    if (M_ > (u64{1} << kMaxInputQubits)) {
      throw std::invalid_argument("Distribution: M above 2^61 overflows the phase arithmetic");
    }
    count_lo_ = M_ / r_;
    hi_branches_ = M_ % r_;
    peaks_ = hi_branches_ == 0;
    if (peaks_) {
      if (r_ <= kMaterializeCap) {
        support_.reserve(r_);
        const u64 spacing = M_ / r_;
        for (u64 lambda = 0; lambda < r_; ++lambda) support_.push_back(lambda * spacing);
        has_support_ = true;
      }
    } else if (M_ <= kMaterializeCap) {
      cdf_.resize(M_);
      double acc = 0.0;
      for (u64 p = 0; p < M_; ++p) {
        const double w = mass(p);
        if (w > kSupportThreshold) support_.push_back(p);
        acc += w;
        cdf_[p] = acc;
      }
      has_support_ = true;
    }
  }

  u64 points() const { return M_; }
  u64 period() const { return r_; }
  bool peaks_exact() const { return peaks_; }

  // O(1), defined for every p in [0, M)
  double mass(u64 p) const {
    const double hi = detail::branch_power(p, r_, M_, count_lo_ + 1);
    const double lo = detail::branch_power(p, r_, M_, count_lo_);
    const double total = static_cast<double>(hi_branches_) * hi +
                         static_cast<double>(r_ - hi_branches_) * lo;
    return total / (static_cast<double>(M_) * static_cast<double>(M_));
  }

  const std::vector<u64>& support() const {
    require_table("support enumeration");
    return support_;
  }

  // Sum of mass over every outcome; off-peak outcomes are exact zeros when
  // r divides M, so the peak sum is the whole total there.
  double total_mass() const {
    if (M_ <= kMaterializeCap) {
      double acc = 0.0;
      for (u64 p = 0; p < M_; ++p) acc += mass(p);
      return acc;
    }
    if (peaks_) {
      double acc = 0.0;
      const u64 spacing = M_ / r_;
      for (u64 lambda = 0; lambda < r_; ++lambda) acc += mass(lambda * spacing);
      return acc;
    }
    throw std::domain_error("Distribution: mass total needs M <= 2^20 unless r divides M");
  }

  u64 sample(Rng& rng) const {
    if (peaks_) {
      const u64 lambda = rng.uniform_below(r_);
      return lambda * (M_ / r_);
    }
    require_table("sampling");
    const double u = rng.uniform_unit() * cdf_.back();
    u64 lo = 0, hi = M_ - 1;
    while (lo < hi) {
      const u64 mid = lo + (hi - lo) / 2;
      if (cdf_[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

 private:
  void require_table(const char* what) const {
    if (!has_support_) {
      throw std::domain_error(std::string("Distribution: ") + what +
                              " needs M <= 2^20 unless r divides M");
    }
  }

  u64 M_;
  u64 r_;
  u64 count_lo_;
  u64 hi_branches_;
  bool peaks_ = false;
  bool has_support_ = false;
  std::vector<u64> support_;
  std::vector<double> cdf_;
};

inline Distribution qft_distribution(const PeriodicState& state) {
  return Distribution(state.M, state.r);
}

enum class Stage { post_modexp, post_qft };

struct DenseEntry {
  u64 x;  // input register value (exponent before the QFT, outcome p after)
  u64 f;  // output register residue
  std::complex<double> amplitude;
};

struct DenseState {
  Stage stage;
  u64 M = 0;
  std::vector<DenseEntry> entries;  // nonzero amplitudes, ordered by input value
};

// Full amplitude expansion, for validation and dumps only. Capped at n = 12.
inline DenseState dense_state(const Problem& problem, Stage stage) {
  if (problem.n > kDenseCap) {
    throw std::domain_error("dense_state: dense dumps are capped at 12 input qubits");
  }
  const PeriodicState state = apply_modexp(prepare_uniform(problem));
  DenseState dense;
  dense.stage = stage;
  dense.M = state.M;
  const double root_m = std::sqrt(static_cast<double>(state.M));
  if (stage == Stage::post_modexp) {
    dense.entries.resize(state.M);
    for (const Branch& b : state.branches) {
      for (u64 q = 0; q < b.count; ++q) {
        const u64 x = q * state.r + b.offset;
        dense.entries[x] = {x, b.residue, {1.0 / root_m, 0.0}};
      }
    }
    return dense;
  }
  const double inv_m = 1.0 / static_cast<double>(state.M);
  for (u64 p = 0; p < state.M; ++p) {
    for (const Branch& b : state.branches) {
      const std::complex<double> sum = detail::branch_sum(p, state.r, state.M, b.count);
      if (std::norm(sum) * inv_m * inv_m < kSupportThreshold * kSupportThreshold) continue;
      const u64 phase_t = static_cast<u64>(static_cast<u128>(p) * b.offset % state.M);
      dense.entries.push_back({p, b.residue, detail::unit_phase(phase_t, state.M) * sum * inv_m});
    }
  }
  return dense;
}

// Sample the input register of the post-QFT state.
inline u64 measure_input(const Distribution& distribution, Rng& rng) {
  return distribution.sample(rng);
}

// One residue class of exponents after the output register collapsed to it:
// a uniform superposition over {l, l+r, ..., l+(count-1)r}.
struct CollapsedBranch {
  u64 l = 0;
  u64 r = 0;
  u64 count = 0;
  u64 residue = 0;
  u64 M = 0;

  // direct measurement of the input register in this branch
  u64 sample_value(Rng& rng) const { return l + r * rng.uniform_below(count); }
};

// Measure the output register first: branch l is seen with probability
// (s_l + 1)/M. Selecting l as (uniform j in [0,M)) mod r realizes those
// weights exactly.
inline CollapsedBranch measure_output_first(const PeriodicState& state, Rng& rng) {
  const u64 j = rng.uniform_below(state.M);
  const u64 l = j % state.r;
  const Branch& b = state.branches[l];
  return CollapsedBranch{b.offset, state.r, b.count, b.residue, state.M};
}

/*
 * Input-register distribution after applying the QFT to one collapsed
 * branch: P(p | l) = |G_l(p)|^2 / (M * count). The branch phase has unit
 * modulus, so the conditional distribution does not depend on l.
 */
class BranchDistribution {
 public:
  explicit BranchDistribution(const CollapsedBranch& branch)
      : M_(branch.M), r_(branch.r), count_(branch.count) {
    if (count_ == 0) throw std::invalid_argument("BranchDistribution: empty branch");
    peaks_ = (M_ % r_ == 0) && (count_ == M_ / r_);
    if (!peaks_) {
      if (M_ > kMaterializeCap) {
        throw std::domain_error("BranchDistribution: sampling needs M <= 2^20 unless r divides M");
      }
      cdf_.resize(M_);
      double acc = 0.0;
      for (u64 p = 0; p < M_; ++p) {
        acc += mass(p);
        cdf_[p] = acc;
      }
    }
  }

  double mass(u64 p) const {
    return detail::branch_power(p, r_, M_, count_) /
           (static_cast<double>(M_) * static_cast<double>(count_));
  }

  u64 sample(Rng& rng) const {
    if (peaks_) {
      return rng.uniform_below(r_) * (M_ / r_);
    }
    const double u = rng.uniform_unit() * cdf_.back();
    u64 lo = 0, hi = M_ - 1;
    while (lo < hi) {
      const u64 mid = lo + (hi - lo) / 2;
      if (cdf_[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

 private:
  u64 M_;
  u64 r_;
  u64 count_;
  bool peaks_ = false;
  std::vector<double> cdf_;
};

}  // namespace shorlab::qstate

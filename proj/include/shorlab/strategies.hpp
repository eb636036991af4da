#pragma once

#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shorlab/noise.hpp"
#include "shorlab/numtheory.hpp"
#include "shorlab/qstate.hpp"

/*
 * End-to-end run pipelines. Each takes (problem, seed) and owns a fresh
 * random source, so a record is a pure function of its inputs and replays
 * byte-for-byte. An optional readout model perturbs every value that is
 * actually read out of a register.
 */
namespace shorlab::strategies {

enum class Strategy { standard, output_first, skip_qft, accumulate, nmr_ensemble };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::standard: return "standard";
    case Strategy::output_first: return "output_first";
    case Strategy::skip_qft: return "skip_qft";
    case Strategy::accumulate: return "accumulate";
    case Strategy::nmr_ensemble: return "nmr_ensemble";
  }
  return "?";
}

enum class FailureReason {
  indeterminate,          // measured value carries no period information
  no_verified_candidate,  // candidates existed but none satisfied A^r = 1
  odd_period,
  trivial_root,
  not_a_period
};

inline const char* to_string(FailureReason f) {
  switch (f) {
    case FailureReason::indeterminate: return "indeterminate";
    case FailureReason::no_verified_candidate: return "no_verified_candidate";
    case FailureReason::odd_period: return "odd_period";
    case FailureReason::trivial_root: return "trivial_root";
    case FailureReason::not_a_period: return "not_a_period";
  }
  return "?";
}

struct Sample {
  std::string register_name;  // "input", "output", "aux"
  int bits;
  u64 value;
};

struct RunRecord {
  Strategy strategy = Strategy::standard;
  u64 seed = 0;
  std::vector<Sample> samples;
  std::vector<numtheory::PeriodCandidate> period_candidates;
  std::optional<std::pair<u64, u64>> factors;
  std::optional<FailureReason> failure;

  bool succeeded() const { return factors.has_value(); }
};

struct RunOptions {
  std::optional<noise::ReadoutModel> readout;
};

namespace detail {

inline u64 read_out(u64 value, int bits, const RunOptions& options, Rng& rng) {
  if (!options.readout) return value;
  return noise::apply_readout_noise(value, bits, *options.readout, rng);
}

// Verify candidates in ascending order and factor with the first one that
// works. The smallest verified candidate is the true order, so when every
// attempt fails the first attempt's reason is the informative one.
inline void resolve_candidates(RunRecord& record, u64 A, u64 N) {
  if (record.period_candidates.empty()) {
    record.failure = FailureReason::indeterminate;
    return;
  }
  std::optional<numtheory::FactorFailure> first_failure;
  for (const auto& candidate : record.period_candidates) {
    if (numtheory::mod_pow(A, candidate.r, N) != 1) continue;
    const auto outcome = numtheory::extract_factors(A, candidate.r, N);
    if (outcome.ok()) {
      record.factors = outcome.factors;
      record.failure.reset();
      return;
    }
    if (!first_failure) first_failure = outcome.failure;
  }
  if (!first_failure) {
    record.failure = FailureReason::no_verified_candidate;
    return;
  }
  switch (*first_failure) {
    case numtheory::FactorFailure::odd_period: record.failure = FailureReason::odd_period; break;
    case numtheory::FactorFailure::trivial_root: record.failure = FailureReason::trivial_root; break;
    case numtheory::FactorFailure::not_a_period: record.failure = FailureReason::not_a_period; break;
  }
}

}  // namespace detail

// Full pipeline: uniform superposition, modular exponentiation, QFT, one
// input-register measurement, then period inference and factor extraction.
inline RunRecord run_standard(const qstate::Problem& problem, u64 seed,
                              const RunOptions& options = {}) {
  Rng rng(seed);
  RunRecord record;
  record.strategy = Strategy::standard;
  record.seed = seed;

  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto distribution = qstate::qft_distribution(state);
  const u64 p = detail::read_out(qstate::measure_input(distribution, rng), problem.n, options, rng);
  record.samples.push_back({"input", problem.n, p});
  record.period_candidates = numtheory::infer_period(p, problem.M, problem.instance.N);
  detail::resolve_candidates(record, problem.instance.A, problem.instance.N);
  return record;
}

// Measure the output register first, then QFT the surviving branch and
// measure the input register. The input marginal provably equals
// run_standard's distribution, which is the point being exhibited.
inline RunRecord run_output_first(const qstate::Problem& problem, u64 seed,
                                  const RunOptions& options = {}) {
  Rng rng(seed);
  RunRecord record;
  record.strategy = Strategy::output_first;
  record.seed = seed;

  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto branch = qstate::measure_output_first(state, rng);
  const u64 residue = detail::read_out(branch.residue, problem.m, options, rng);
  record.samples.push_back({"output", problem.m, residue});

  const qstate::BranchDistribution conditional(branch);
  const u64 p = detail::read_out(conditional.sample(rng), problem.n, options, rng);
  record.samples.push_back({"input", problem.n, p});
  record.period_candidates = numtheory::infer_period(p, problem.M, problem.instance.N);
  detail::resolve_candidates(record, problem.instance.A, problem.instance.N);
  return record;
}

/*
 * The no-QFT shortcut: prepare the output register in residue 1, which pins
 * the l = 0 branch, and measure the input register directly. Outcomes are
 * exact multiples of r. Candidates come from the gcd of all nonzero samples
 * seen so far (or just this run's sample): every divisor <= N of that gcd.
 */
inline RunRecord run_skip_qft(const qstate::Problem& problem, u64 seed,
                              std::span<const u64> prior_samples = {},
                              const RunOptions& options = {}) {
  Rng rng(seed);
  RunRecord record;
  record.strategy = Strategy::skip_qft;
  record.seed = seed;

  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const qstate::CollapsedBranch branch{0, state.r, state.branches[0].count, 1, state.M};
  const u64 value = detail::read_out(branch.sample_value(rng), problem.n, options, rng);
  record.samples.push_back({"input", problem.n, value});

  u64 g = value;
  for (u64 prior : prior_samples) {
    if (prior != 0) g = std::gcd(g, prior);
  }
  if (g != 0) {
    for (u64 d : divisors_of(g)) {
      if (d <= problem.instance.N) {
        record.period_candidates.push_back({d, numtheory::CandidateSource::gcd_of_samples, value});
      }
    }
  }
  detail::resolve_candidates(record, problem.instance.A, problem.instance.N);
  return record;
}

enum class AccumulateSource { standard, skip_qft };

inline const char* to_string(AccumulateSource s) {
  return s == AccumulateSource::standard ? "standard" : "skip_qft";
}

// Auxiliary register width that cannot overflow when k n-bit values are added.
inline int accumulate_register_bits(int n, u64 k) {
  int extra = 0;
  while ((u64{1} << extra) < k) ++extra;
  return n + extra;
}

/*
 * Accumulation protocol: run the pipeline k times, add each run's
 * input-register value into an auxiliary register, and measure only that
 * register once at the end. Each addend is modeled as an independent sample
 * (the only self-consistent reading of an unmeasured-but-added register).
 * With the skip-QFT source every addend is a multiple of r, so the sum is
 * too, and its divisors <= N are period candidates. No candidate inference
 * is claimed for the standard source.
 */
inline RunRecord run_accumulate(const qstate::Problem& problem, u64 k, AccumulateSource source,
                                u64 seed, const RunOptions& options = {}) {
  if (k < 1) throw std::invalid_argument("run_accumulate: k must be >= 1");
  Rng rng(seed);
  RunRecord record;
  record.strategy = Strategy::accumulate;
  record.seed = seed;

  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  u64 sum = 0;
  if (source == AccumulateSource::skip_qft) {
    const qstate::CollapsedBranch branch{0, state.r, state.branches[0].count, 1, state.M};
    for (u64 i = 0; i < k; ++i) sum += branch.sample_value(rng);
  } else {
    const auto distribution = qstate::qft_distribution(state);
    for (u64 i = 0; i < k; ++i) sum += distribution.sample(rng);
  }

  const int aux_bits = accumulate_register_bits(problem.n, k);
  const u64 readout = detail::read_out(sum, aux_bits, options, rng);
  record.samples.push_back({"aux", aux_bits, readout});

  if (source == AccumulateSource::skip_qft && readout != 0) {
    for (u64 d : divisors_of(readout)) {
      if (d <= problem.instance.N) {
        record.period_candidates.push_back({d, numtheory::CandidateSource::gcd_of_samples, readout});
      }
    }
  }
  detail::resolve_candidates(record, problem.instance.A, problem.instance.N);
  return record;
}

/*
 * Ensemble (NMR-style) readout: average each bit of the post-QFT outcome
 * over many independent shots. Bits whose mean sits in the variable band
 * count toward K, and r is estimated as 2^K. Meaningful when r is a power
 * of two; the verified flag says whether the estimate actually is a period.
 */
struct EnsembleReport {
  u64 shots = 0;
  std::vector<double> bit_means;
  int variable_bits = 0;
  u64 variable_mask = 0;
  u64 r_estimate = 1;
  bool verified = false;
  u64 seed = 0;
};

inline constexpr double kVariableBandLow = 0.25;
inline constexpr double kVariableBandHigh = 0.75;

inline EnsembleReport run_nmr_ensemble(const qstate::Problem& problem, u64 shots, u64 seed,
                                       const RunOptions& options = {}) {
  if (shots < 1) throw std::invalid_argument("run_nmr_ensemble: shots must be >= 1");
  Rng rng(seed);
  EnsembleReport report;
  report.shots = shots;
  report.seed = seed;

  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto distribution = qstate::qft_distribution(state);
  std::vector<u64> ones(problem.n, 0);
  for (u64 s = 0; s < shots; ++s) {
    const u64 p = detail::read_out(distribution.sample(rng), problem.n, options, rng);
    for (int b = 0; b < problem.n; ++b) {
      ones[b] += (p >> b) & 1;
    }
  }
  report.bit_means.resize(problem.n);
  for (int b = 0; b < problem.n; ++b) {
    report.bit_means[b] = static_cast<double>(ones[b]) / static_cast<double>(shots);
    if (report.bit_means[b] >= kVariableBandLow && report.bit_means[b] <= kVariableBandHigh) {
      ++report.variable_bits;
      report.variable_mask |= u64{1} << b;
    }
  }
  report.r_estimate = u64{1} << report.variable_bits;
  report.verified =
      numtheory::mod_pow(problem.instance.A, report.r_estimate, problem.instance.N) == 1;
  return report;
}

}  // namespace shorlab::strategies

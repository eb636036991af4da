#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shorlab/strategies.hpp"

/*
 * Retry loop around the run pipelines: pick a base (fixed or per-attempt
 * random), run the chosen strategy until factors appear or the run budget
 * is exhausted. A base sharing a factor with N short-circuits as an
 * immediate factor.
 */
namespace shorlab::driver {

struct FactorConfig {
  u64 N = 0;
  std::optional<u64> A;
  std::optional<int> n;
  std::optional<int> m;
  bool allow_small_register = false;
  strategies::Strategy strategy = strategies::Strategy::standard;
  u64 max_runs = 20;
  u64 accumulate_k = 3;
  strategies::AccumulateSource accumulate_source = strategies::AccumulateSource::skip_qft;
  u64 nmr_shots = 10000;
  std::optional<double> fidelity;
  u64 seed = 0;
};

struct FactorReport {
  std::optional<std::pair<u64, u64>> factors;
  bool immediate_factor = false;
  u64 base_used = 0;
  u64 runs_used = 0;
  std::vector<strategies::RunRecord> records;
  std::optional<strategies::EnsembleReport> ensemble;
};

inline void validate(const FactorConfig& config) {
  if (config.N < 3) throw std::invalid_argument("N must be >= 3");
  if (config.N % 2 == 0) throw std::invalid_argument("N must be odd");
  if (config.A && (*config.A <= 1 || *config.A >= config.N)) {
    throw std::invalid_argument("base A must satisfy 1 < A < N");
  }
  if (config.max_runs < 1) throw std::invalid_argument("max-runs must be >= 1");
  const int standard_n = numtheory::register_size_for(config.N);
  const int n = config.n.value_or(standard_n);
  if (n < standard_n && !config.allow_small_register) {
    throw std::invalid_argument(
        "an input register of " + std::to_string(n) + " qubits is below the N^2 sizing rule (" +
        std::to_string(standard_n) + "); pass --allow-small-register to run anyway");
  }
  if ((u64{1} << n) > qstate::kMaterializeCap) {
    throw std::invalid_argument(
        "input register of " + std::to_string(n) +
        " qubits exceeds the experiment cap M <= 2^20; pass --qubits 20 or less");
  }
}

inline FactorReport factor_with_retries(const FactorConfig& config) {
  validate(config);
  FactorReport report;
  strategies::RunOptions options;
  if (config.fidelity) options.readout = noise::ReadoutModel(*config.fidelity);

  Rng base_rng(derive_seed(config.seed, 0xBA5E));
  std::vector<u64> skip_qft_history;

  for (u64 attempt = 0; attempt < config.max_runs; ++attempt) {
    const u64 A = config.A ? *config.A : 2 + base_rng.uniform_below(config.N - 2);
    const auto instance = numtheory::make_instance(config.N, A);
    if (std::holds_alternative<numtheory::ImmediateFactor>(instance)) {
      const auto& immediate = std::get<numtheory::ImmediateFactor>(instance);
      report.factors = std::make_pair(immediate.factor, immediate.cofactor);
      report.immediate_factor = true;
      report.base_used = A;
      report.runs_used = attempt;  // no quantum run was needed
      return report;
    }
    const auto problem = qstate::make_problem(std::get<numtheory::FactoringInstance>(instance),
                                              config.n, config.m);
    const u64 run_seed = derive_seed(config.seed, attempt + 1);

    strategies::RunRecord record;
    switch (config.strategy) {
      case strategies::Strategy::standard:
        record = strategies::run_standard(problem, run_seed, options);
        break;
      case strategies::Strategy::output_first:
        record = strategies::run_output_first(problem, run_seed, options);
        break;
      case strategies::Strategy::skip_qft:
        record = strategies::run_skip_qft(problem, run_seed, skip_qft_history, options);
        if (!record.samples.empty() && record.samples.front().value != 0) {
          skip_qft_history.push_back(record.samples.front().value);
        }
        break;
      case strategies::Strategy::accumulate:
        record = strategies::run_accumulate(problem, config.accumulate_k,
                                            config.accumulate_source, run_seed, options);
        break;
      case strategies::Strategy::nmr_ensemble: {
        const auto ensemble = strategies::run_nmr_ensemble(problem, config.nmr_shots, run_seed,
                                                           options);
        report.ensemble = ensemble;
        record.strategy = strategies::Strategy::nmr_ensemble;
        record.seed = run_seed;
        record.period_candidates.push_back({ensemble.r_estimate,
                                            numtheory::CandidateSource::bit_count,
                                            ensemble.variable_mask});
        strategies::detail::resolve_candidates(record, A, config.N);
        break;
      }
    }
    report.records.push_back(record);
    report.runs_used = attempt + 1;
    if (record.succeeded()) {
      report.factors = record.factors;
      report.base_used = A;
      return report;
    }
  }
  return report;
}

}  // namespace shorlab::driver

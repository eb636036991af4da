#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "shorlab/serialize.hpp"
#include "shorlab/strategies.hpp"

/*
 * Desk-scale audits: reproduce the published worked examples for (15, 7)
 * and (119, 92) from hardcoded golden tables, and test the quantitative
 * claims made around them against exact computation. Verdicts are computed,
 * never presumed; the suite is an instrument, not an advocate.
 */
namespace shorlab::audit {

using serialize::json;

enum class Verdict { reproduced, refuted_by_counterexample, consistent, inconsistent, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::reproduced: return "reproduced";
    case Verdict::refuted_by_counterexample: return "refuted_by_counterexample";
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ClaimReport {
  std::string claim_id;
  std::string paper_locus;
  Verdict verdict = Verdict::inconclusive;
  json evidence;
  u64 trials = 0;
  u64 seed = 0;
};

inline json to_json(const ClaimReport& report) {
  return json{
      {"claim_id", report.claim_id},
      {"paper_locus", report.paper_locus},
      {"verdict", to_string(report.verdict)},
      {"evidence", report.evidence},
      {"trials", report.trials},
      {"seed", report.seed},
  };
}

struct GoldenEntry {
  u64 x;
  u64 f;
  double re;
  double im;
};

// Post-modexp amplitudes for (N=15, A=7, n=m=4): sixteen entries of 1/4,
// residues cycling 1, 7, 4, 13.
inline std::vector<GoldenEntry> eq18_table() {
  std::vector<GoldenEntry> table;
  static constexpr u64 residues[4] = {1, 7, 4, 13};
  for (u64 x = 0; x < 16; ++x) table.push_back({x, residues[x % 4], 0.25, 0.0});
  return table;
}

// Post-QFT amplitudes for the same instance: peaks at p = 0, 4, 8, 12 with
// the phase pattern (1, i^l, (-1)^l, (-i)^l)/4 on the residue row l.
inline std::vector<GoldenEntry> eq19_table() {
  return {
      {0, 1, 0.25, 0.0},  {4, 1, 0.25, 0.0},   {8, 1, 0.25, 0.0},   {12, 1, 0.25, 0.0},
      {0, 7, 0.25, 0.0},  {4, 7, 0.0, 0.25},   {8, 7, -0.25, 0.0},  {12, 7, 0.0, -0.25},
      {0, 4, 0.25, 0.0},  {4, 4, -0.25, 0.0},  {8, 4, 0.25, 0.0},   {12, 4, -0.25, 0.0},
      {0, 13, 0.25, 0.0}, {4, 13, 0.0, -0.25}, {8, 13, -0.25, 0.0}, {12, 13, 0.0, 0.25},
  };
}

// Input-register outcomes for (N=119, A=92, n=14): sixteen peaks at the
// multiples of 1024, mass 1/16 each.
inline std::vector<u64> eq21_support() {
  std::vector<u64> support;
  for (u64 lambda = 0; lambda < 16; ++lambda) support.push_back(lambda * 1024);
  return support;
}

/*
 * A dense state matches a golden table when every table entry is present
 * within tol and the state carries nothing beyond the table. Returns the
 * largest deviation seen (table-entry error or stray amplitude magnitude).
 */
inline double table_deviation(const qstate::DenseState& dense,
                              const std::vector<GoldenEntry>& table) {
  std::map<std::pair<u64, u64>, std::complex<double>> want;
  for (const auto& g : table) want[{g.x, g.f}] = {g.re, g.im};
  double worst = 0.0;
  std::map<std::pair<u64, u64>, bool> seen;
  for (const auto& e : dense.entries) {
    const auto it = want.find({e.x, e.f});
    if (it == want.end()) {
      worst = std::max(worst, std::abs(e.amplitude));
      continue;
    }
    seen[{e.x, e.f}] = true;
    worst = std::max(worst, std::abs(e.amplitude - it->second));
  }
  for (const auto& g : table) {
    if (!seen.count({g.x, g.f})) {
      worst = std::max(worst, std::hypot(g.re, g.im));  // missing entry
    }
  }
  return worst;
}

inline constexpr double kGoldenTol = 1e-12;

namespace detail {

inline qstate::Problem worked_example_15_7(int n) {
  return qstate::make_problem(numtheory::FactoringInstance(15, 7), n, 4);
}

inline ClaimReport golden_claim(const char* id, const char* locus, qstate::Stage stage,
                                const std::vector<GoldenEntry>& table) {
  const auto dense = qstate::dense_state(worked_example_15_7(4), stage);
  const double deviation = table_deviation(dense, table);
  ClaimReport report;
  report.claim_id = id;
  report.paper_locus = locus;
  report.verdict = deviation <= kGoldenTol ? Verdict::reproduced : Verdict::inconsistent;
  report.evidence = json{{"entry_count", dense.entries.size()},
                         {"table_entries", table.size()},
                         {"max_deviation", deviation},
                         {"tolerance", kGoldenTol}};
  report.trials = 1;
  return report;
}

}  // namespace detail

inline ClaimReport reproduce_eq18() {
  return detail::golden_claim("eq18", "Sec. IV, Eq. 18", qstate::Stage::post_modexp, eq18_table());
}

inline ClaimReport reproduce_eq19() {
  return detail::golden_claim("eq19", "Sec. IV, Eq. 19", qstate::Stage::post_qft, eq19_table());
}

inline std::array<ClaimReport, 2> reproduce_eq18_19() {
  return {reproduce_eq18(), reproduce_eq19()};
}

/*
 * The (119, 92) worked example lists outcomes 0, 1024, ..., 15360 at mass
 * 1/16 but states a 13-qubit input register; those outcomes need 14 qubits
 * (13 gives spacing 512), and the standard sizing rule for 119 gives 14.
 * The discrepancy is recorded in the evidence whatever n is passed.
 */
inline ClaimReport reproduce_eq21(int n = 14) {
  const auto problem = qstate::make_problem(numtheory::FactoringInstance(119, 92), n);
  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto distribution = qstate::qft_distribution(state);
  const auto expected = eq21_support();

  double worst = 0.0;
  bool support_matches = distribution.support().size() == expected.size();
  if (support_matches) {
    for (std::size_t i = 0; i < expected.size(); ++i) {
      support_matches = support_matches && distribution.support()[i] == expected[i];
    }
  }
  if (support_matches) {
    for (u64 p : expected) worst = std::max(worst, std::abs(distribution.mass(p) - 1.0 / 16.0));
  }
  bool low_bits_zero = true;
  for (u64 p : distribution.support()) low_bits_zero = low_bits_zero && (p & 0x3ff) == 0;

  ClaimReport report;
  report.claim_id = "eq21";
  report.paper_locus = "Sec. IV, Eq. 21";
  report.verdict =
      support_matches && worst <= kGoldenTol ? Verdict::reproduced : Verdict::inconsistent;
  report.evidence = json{
      {"r", state.r},
      {"support_points", distribution.support().size()},
      {"support_spacing", problem.M / state.r},
      {"max_mass_deviation", worst},
      {"low_10_bits_zero_on_support", low_bits_zero},
      {"input_qubits_used", n},
      {"input_qubits_stated", 13},
      {"sizing_rule_qubits", numtheory::register_size_for(119)},
      {"note", "the listed outcomes require 14 input qubits; 13 would space the peaks by 512"},
  };
  report.trials = 1;
  return report;
}

// Exact maximum outcome probability versus the claimed 1/r ceiling.
inline ClaimReport claim_peak_bound(const qstate::Problem& problem) {
  if (problem.M > qstate::kMaterializeCap) {
    throw std::invalid_argument("claim_peak_bound: M must be <= 2^20");
  }
  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto distribution = qstate::qft_distribution(state);
  double max_mass = 0.0, max_nonzero = 0.0;
  u64 argmax = 0, argmax_nonzero = 0;
  for (u64 p = 0; p < problem.M; ++p) {
    const double w = distribution.mass(p);
    if (w > max_mass) {
      max_mass = w;
      argmax = p;
    }
    if (p != 0 && w > max_nonzero) {
      max_nonzero = w;
      argmax_nonzero = p;
    }
  }
  const double bound = 1.0 / static_cast<double>(state.r);
  ClaimReport report;
  report.claim_id = "peak_bound";
  report.paper_locus = "Sec. IV (outcome probability <= 1/r)";
  report.verdict = max_mass <= bound + 1e-12 ? Verdict::consistent : Verdict::inconsistent;
  report.evidence = json{
      {"N", problem.instance.N}, {"A", problem.instance.A},   {"n", problem.n},
      {"r", state.r},            {"r_divides_M", distribution.peaks_exact()},
      {"bound", bound},          {"max_mass", max_mass},      {"argmax", argmax},
      {"max_nonzero_mass", max_nonzero},                      {"argmax_nonzero", argmax_nonzero},
  };
  report.trials = 1;
  return report;
}

// The same bound swept over every instance (odd N, smallest valid A,
// standard register sizing) up to max_n.
inline ClaimReport claim_peak_bound_sweep(u64 max_n) {
  json violations = json::array();
  u64 instances = 0, violating = 0, skipped = 0;
  double worst_ratio = 0.0;
  for (u64 N = 3; N <= max_n; N += 2) {
    u64 A = 0;
    for (u64 a = 2; a < N; ++a) {
      if (std::gcd(a, N) == 1) {
        A = a;
        break;
      }
    }
    if (A == 0) continue;
    const auto problem = qstate::make_problem(numtheory::FactoringInstance(N, A));
    if (problem.M > qstate::kMaterializeCap) {
      ++skipped;
      continue;
    }
    const auto single = claim_peak_bound(problem);
    ++instances;
    const double ratio = single.evidence["max_mass"].get<double>() *
                         static_cast<double>(single.evidence["r"].get<u64>());
    worst_ratio = std::max(worst_ratio, ratio);
    if (single.verdict == Verdict::inconsistent) {
      ++violating;
      if (violations.size() < 10) violations.push_back(single.evidence);
    }
  }
  ClaimReport report;
  report.claim_id = "peak_bound";
  report.paper_locus = "Sec. IV (outcome probability <= 1/r)";
  if (instances == 0) {
    report.verdict = Verdict::inconclusive;
  } else {
    report.verdict = violating == 0 ? Verdict::consistent : Verdict::inconsistent;
  }
  report.evidence = json{{"max_n", max_n},
                         {"instances", instances},
                         {"violating_instances", violating},
                         {"skipped_over_cap", skipped},
                         {"worst_mass_times_r", worst_ratio},
                         {"violations", violations}};
  report.trials = instances;
  return report;
}

/*
 * Search for power-of-two orders among odd composite N <= max_n. The claim
 * under test says such N must have the form 2^M + 1; any (N, A) with
 * r = 2^k and N - 1 not a power of two refutes it.
 */
inline ClaimReport claim_power_of_two_form(u64 max_n) {
  if (max_n > 10000) throw std::invalid_argument("claim_power_of_two_form: max_n must be <= 10^4");
  auto is_composite = [](u64 v) {
    for (u64 d = 3; d * d <= v; d += 2) {
      if (v % d == 0) return true;
    }
    return false;
  };
  auto is_power_of_two = [](u64 v) { return v != 0 && (v & (v - 1)) == 0; };

  json counterexamples = json::array();
  u64 cases = 0, counterexample_count = 0;
  for (u64 N = 9; N <= max_n; N += 2) {
    if (!is_composite(N)) continue;
    for (u64 A = 2; A < N; ++A) {
      if (std::gcd(A, N) != 1) continue;
      u64 t = A % N;
      for (int k = 1; k <= 14; ++k) {
        t = mulmod(t, t, N);
        if (t == 1) {
          ++cases;  // order is exactly 2^k
          if (!is_power_of_two(N - 1)) {
            ++counterexample_count;
            if (counterexamples.size() < 10) {
              counterexamples.push_back(json{{"N", N}, {"A", A}, {"r", u64{1} << k}});
            }
          }
          break;
        }
      }
    }
  }
  ClaimReport report;
  report.claim_id = "pow2form";
  report.paper_locus = "Sec. IV (r = 2^k implies N = 2^M + 1)";
  if (cases == 0) {
    report.verdict = Verdict::inconclusive;
  } else if (counterexample_count > 0) {
    report.verdict = Verdict::refuted_by_counterexample;
  } else {
    report.verdict = Verdict::consistent;
  }
  report.evidence = json{{"max_n", max_n},
                         {"power_of_two_order_cases", cases},
                         {"counterexample_count", counterexample_count},
                         {"counterexamples", counterexamples}};
  report.trials = cases;
  return report;
}

/*
 * Rerun probability: (a) how often two independent runs both land on one
 * designated nonzero outcome (the smallest nonzero support point), tested
 * against the claimed 1/r^2 ceiling; (b) how often standard post-processing
 * over the two runs recovers r, reported as context.
 */
inline ClaimReport claim_rerun_probability(const qstate::Problem& problem, u64 trials, u64 seed) {
  if (trials < 10000) {
    throw std::invalid_argument("claim_rerun_probability: trials must be >= 10^4");
  }
  const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
  const auto distribution = qstate::qft_distribution(state);
  u64 specific = 0;
  for (u64 p : distribution.support()) {
    if (p != 0) {
      specific = p;
      break;
    }
  }
  if (specific == 0) throw std::domain_error("claim_rerun_probability: no nonzero support");

  Rng rng(seed);
  u64 both_specific = 0, recovered = 0;
  for (u64 t = 0; t < trials; ++t) {
    const u64 p1 = distribution.sample(rng);
    const u64 p2 = distribution.sample(rng);
    if (p1 == specific && p2 == specific) ++both_specific;
    u64 smallest_verified = 0;
    for (u64 p : {p1, p2}) {
      for (const auto& cand : numtheory::infer_period(p, problem.M, problem.instance.N)) {
        if (smallest_verified != 0 && cand.r >= smallest_verified) continue;
        if (numtheory::mod_pow(problem.instance.A, cand.r, problem.instance.N) == 1) {
          smallest_verified = cand.r;
        }
      }
    }
    if (smallest_verified == state.r) ++recovered;
  }
  const double rate_a = static_cast<double>(both_specific) / static_cast<double>(trials);
  const double se_a = std::sqrt(std::max(rate_a * (1.0 - rate_a), 1e-12) /
                                static_cast<double>(trials));
  const double rate_b = static_cast<double>(recovered) / static_cast<double>(trials);
  const double se_b = std::sqrt(std::max(rate_b * (1.0 - rate_b), 1e-12) /
                                static_cast<double>(trials));
  const double bound = 1.0 / (static_cast<double>(state.r) * static_cast<double>(state.r));
  const double analytic = distribution.mass(specific) * distribution.mass(specific);

  ClaimReport report;
  report.claim_id = "rerun";
  report.paper_locus = "Sec. IV (rerun probability <= 1/r^2)";
  report.verdict = rate_a <= bound + 3.0 * se_a ? Verdict::consistent : Verdict::inconsistent;
  report.evidence = json{
      {"N", problem.instance.N},
      {"A", problem.instance.A},
      {"n", problem.n},
      {"r", state.r},
      {"specific_value", specific},
      {"rate_same_specific", rate_a},
      {"se_same_specific", se_a},
      {"analytic_same_specific", analytic},
      {"bound_1_over_r2", bound},
      {"rate_recover_r_two_runs", rate_b},
      {"se_recover_r_two_runs", se_b},
  };
  report.trials = trials;
  report.seed = seed;
  return report;
}

struct SweepRow {
  u64 N = 0;
  u64 A = 0;
  u64 r = 0;
  int n = 0;
  strategies::Strategy strategy = strategies::Strategy::standard;
  u64 trials = 0;
  u64 successes = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

namespace detail {

// Wilson 95% score interval
inline void wilson_interval(u64 successes, u64 trials, double* lo, double* hi) {
  if (trials == 0) {
    *lo = *hi = 0.0;
    return;
  }
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  *lo = std::min(std::max(0.0, center - half), phat);
  *hi = std::max(std::min(1.0, center + half), phat);
}

inline strategies::RunRecord sweep_run(const qstate::Problem& problem,
                                       strategies::Strategy strategy, u64 run_seed) {
  using strategies::Strategy;
  switch (strategy) {
    case Strategy::standard: return strategies::run_standard(problem, run_seed);
    case Strategy::output_first: return strategies::run_output_first(problem, run_seed);
    case Strategy::skip_qft: return strategies::run_skip_qft(problem, run_seed);
    case Strategy::accumulate:
      return strategies::run_accumulate(problem, 3, strategies::AccumulateSource::skip_qft,
                                        run_seed);
    case Strategy::nmr_ensemble: {
      const auto ensemble = strategies::run_nmr_ensemble(problem, 1024, run_seed);
      strategies::RunRecord record;
      record.strategy = Strategy::nmr_ensemble;
      record.seed = run_seed;
      record.period_candidates.push_back({ensemble.r_estimate,
                                          numtheory::CandidateSource::bit_count,
                                          ensemble.variable_mask});
      strategies::detail::resolve_candidates(record, problem.instance.A, problem.instance.N);
      return record;
    }
  }
  throw std::logic_error("sweep_run: unknown strategy");
}

}  // namespace detail

/*
 * Empirical factor-recovery rate per single run, for the smallest valid A
 * and 3 seeded extra bases per N. Instances whose register would exceed the
 * experiment cap are skipped (reported via the skipped list in the CSV's
 * companion claim evidence).
 */
inline std::vector<SweepRow> success_sweep(const std::vector<u64>& n_list,
                                           strategies::Strategy strategy, u64 trials, u64 seed,
                                           std::vector<u64>* skipped = nullptr) {
  std::vector<SweepRow> rows;
  for (u64 N : n_list) {
    std::vector<u64> bases;
    for (u64 a = 2; a < N; ++a) {
      if (std::gcd(a, N) == 1) {
        bases.push_back(a);
        break;
      }
    }
    if (bases.empty()) continue;
    Rng base_rng(derive_seed(seed, N));
    int guard = 0;
    while (bases.size() < 4 && guard++ < 512) {
      const u64 a = 2 + base_rng.uniform_below(N - 3 + 1);
      if (a >= N) continue;
      if (std::gcd(a, N) != 1) continue;
      if (std::find(bases.begin(), bases.end(), a) != bases.end()) continue;
      bases.push_back(a);
    }
    std::sort(bases.begin(), bases.end());
    for (u64 A : bases) {
      const auto problem = qstate::make_problem(numtheory::FactoringInstance(N, A));
      if (problem.M > qstate::kMaterializeCap) {
        if (skipped) skipped->push_back(N);
        continue;
      }
      SweepRow row;
      row.N = N;
      row.A = A;
      row.r = numtheory::multiplicative_order(A, N);
      row.n = problem.n;
      row.strategy = strategy;
      row.trials = trials;
      const u64 instance_seed = derive_seed(derive_seed(seed, N), A);
      for (u64 t = 0; t < trials; ++t) {
        const auto record = detail::sweep_run(problem, strategy, derive_seed(instance_seed, t));
        if (record.succeeded()) ++row.successes;
      }
      row.rate = trials ? static_cast<double>(row.successes) / static_cast<double>(trials) : 0.0;
      detail::wilson_interval(row.successes, row.trials, &row.ci_low, &row.ci_high);
      rows.push_back(row);
    }
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "N,A,r,n,strategy,trials,successes,rate,ci_low,ci_high\n";
  for (const auto& row : rows) {
    out += std::to_string(row.N) + ',' + std::to_string(row.A) + ',' + std::to_string(row.r) +
           ',' + std::to_string(row.n) + ',' + strategies::to_string(row.strategy) + ',' +
           std::to_string(row.trials) + ',' + std::to_string(row.successes) + ',' +
           serialize::fmt_double(row.rate) + ',' + serialize::fmt_double(row.ci_low) + ',' +
           serialize::fmt_double(row.ci_high) + '\n';
  }
  return out;
}

inline json sweep_rows_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json entry{{"N", row.N},
               {"A", row.A},
               {"r", row.r},
               {"n", row.n},
               {"strategy", strategies::to_string(row.strategy)},
               {"trials", row.trials},
               {"successes", row.successes},
               {"rate", row.rate},
               {"ci_low", row.ci_low},
               {"ci_high", row.ci_high}};
    if (row.successes > 0) {
      entry["mean_runs_to_success"] =
          static_cast<double>(row.trials) / static_cast<double>(row.successes);
    } else {
      entry["mean_runs_to_success"] = nullptr;
    }
    out.push_back(entry);
  }
  return out;
}

struct AuditConfig {
  u64 seed = 0;
  u64 peak_bound_max_n = 200;
  u64 pow2form_max_n = 200;
  u64 rerun_trials = 10000;
  std::vector<u64> sweep_n_list = {15, 21, 33, 35};
  u64 sweep_trials = 2000;
  strategies::Strategy sweep_strategy = strategies::Strategy::standard;
};

// The full claim registry, in a fixed order.
inline std::vector<ClaimReport> run_all_claims(const AuditConfig& config) {
  std::vector<ClaimReport> reports;
  reports.push_back(reproduce_eq18());
  reports.push_back(reproduce_eq19());
  reports.push_back(reproduce_eq21());
  reports.push_back(claim_peak_bound_sweep(config.peak_bound_max_n));
  reports.push_back(claim_power_of_two_form(config.pow2form_max_n));
  reports.push_back(claim_rerun_probability(detail::worked_example_15_7(4), config.rerun_trials,
                                            derive_seed(config.seed, 0xA11D17)));
  {
    std::vector<u64> skipped;
    const auto rows = success_sweep(config.sweep_n_list, config.sweep_strategy,
                                    config.sweep_trials, derive_seed(config.seed, 0x53EE9),
                                    &skipped);
    ClaimReport sweep;
    sweep.claim_id = "sweep";
    sweep.paper_locus = "Sec. VI (success probability vs N)";
    sweep.verdict = Verdict::inconclusive;  // measurement, not a yes/no claim
    sweep.evidence = json{{"rows", sweep_rows_json(rows)}, {"skipped_over_cap", skipped}};
    sweep.trials = config.sweep_trials;
    sweep.seed = derive_seed(config.seed, 0x53EE9);
    reports.push_back(sweep);
  }
  for (auto& report : reports) {
    if (report.seed == 0) report.seed = config.seed;
  }
  return reports;
}

}  // namespace shorlab::audit

/*
 * shorlab: exact order-finding simulator, measurement-strategy lab, and
 * claims-audit harness on one command line.
 */
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shorlab/audit.hpp"
#include "shorlab/driver.hpp"
#include "shorlab/report.hpp"

using namespace shorlab;
using serialize::json;

namespace {

u64 resolve_seed(const std::optional<u64>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SHORLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("SHORLAB_SEED is not a valid integer: " + std::string(env));
    }
  }
  std::random_device entropy;
  return (static_cast<u64>(entropy()) << 32) ^ entropy();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << contents;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

// One gate for every command that accepts --qubits: going below the N^2
// sizing rule needs the explicit flag.
void check_register_rule(u64 N, std::optional<int> n, bool allow_small) {
  if (!n) return;
  const int standard_n = numtheory::register_size_for(N);
  if (*n < standard_n && !allow_small) {
    throw std::invalid_argument(
        "an input register of " + std::to_string(*n) + " qubits is below the N^2 sizing rule (" +
        std::to_string(standard_n) + "); pass --allow-small-register to run anyway");
  }
}

struct CommonArgs {
  u64 N = 0;
  std::optional<u64> A;
  std::optional<int> n;
  std::optional<int> m;
  bool allow_small = false;
  std::optional<u64> seed;
  std::string output;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonArgs* args, bool base_required) {
  cmd->add_option("--n-value", args->N, "number to factor (odd, >= 3)")->required();
  auto* base = cmd->add_option("--base", args->A, "base A with 1 < A < N");
  if (base_required) base->required();
  cmd->add_option("--qubits", args->n, "input register qubits (default: N^2 sizing rule)");
  cmd->add_option("--m-qubits", args->m, "output register qubits (default: smallest fitting N)");
  cmd->add_flag("--allow-small-register", args->allow_small,
                "permit input registers below the N^2 sizing rule");
  cmd->add_option("--seed", args->seed, "random seed (fallback: SHORLAB_SEED, then entropy)");
  cmd->add_option("--output", args->output, "write the machine-readable report here");
  cmd->add_option("--format", args->format, "stdout format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
}

qstate::Problem resolve_problem(const CommonArgs& args) {
  check_register_rule(args.N, args.n, args.allow_small);
  const auto instance = numtheory::make_instance(args.N, args.A.value_or(2));
  if (std::holds_alternative<numtheory::ImmediateFactor>(instance)) {
    throw std::invalid_argument("gcd(A, N) > 1; base " + std::to_string(args.A.value_or(2)) +
                                " already factors N - use the factor command");
  }
  return qstate::make_problem(std::get<numtheory::FactoringInstance>(instance), args.n, args.m);
}

void emit(const json& report, const std::string& output, const std::string& format,
          const std::string& csv_payload = {}) {
  if (!output.empty()) {
    if (!csv_payload.empty()) {
      write_file(output, report::csv_preamble(report) + csv_payload);
    } else {
      write_file(output, report.dump(2) + "\n");
    }
    std::cout << report::render_text(report);
    return;
  }
  if (format == "json") {
    std::cout << report.dump(2) << "\n";
  } else if (format == "csv" && !csv_payload.empty()) {
    std::cout << report::csv_preamble(report) << csv_payload;
    std::cerr << report::render_text(report);  // keep the summary visible off the data stream
  } else {
    std::cout << report::render_text(report);
  }
}

int cmd_factor(const CommonArgs& args, const std::string& strategy_name, u64 max_runs, u64 k,
               const std::string& accumulate_source, u64 shots, std::optional<double> fidelity,
               const std::string& records_jsonl) {
  driver::FactorConfig config;
  config.N = args.N;
  config.A = args.A;
  config.n = args.n;
  config.m = args.m;
  config.allow_small_register = args.allow_small;
  config.max_runs = max_runs;
  config.accumulate_k = k;
  config.nmr_shots = shots;
  config.fidelity = fidelity;
  config.seed = resolve_seed(args.seed);
  if (strategy_name == "standard") {
    config.strategy = strategies::Strategy::standard;
  } else if (strategy_name == "output-first") {
    config.strategy = strategies::Strategy::output_first;
  } else if (strategy_name == "skip-qft") {
    config.strategy = strategies::Strategy::skip_qft;
  } else if (strategy_name == "accumulate") {
    config.strategy = strategies::Strategy::accumulate;
  } else {
    config.strategy = strategies::Strategy::nmr_ensemble;
  }
  config.accumulate_source = accumulate_source == "standard"
                                 ? strategies::AccumulateSource::standard
                                 : strategies::AccumulateSource::skip_qft;

  const auto result = driver::factor_with_retries(config);

  json config_json{{"N", config.N},
                   {"A", config.A ? json(*config.A) : json(nullptr)},
                   {"qubits", config.n ? json(*config.n) : json(nullptr)},
                   {"m_qubits", config.m ? json(*config.m) : json(nullptr)},
                   {"allow_small_register", config.allow_small_register},
                   {"strategy", strategies::to_string(config.strategy)},
                   {"max_runs", config.max_runs},
                   {"k", config.accumulate_k},
                   {"accumulate_source", strategies::to_string(config.accumulate_source)},
                   {"shots", config.nmr_shots},
                   {"fidelity", config.fidelity ? json(*config.fidelity) : json(nullptr)}};
  json report = report::envelope("factor", std::move(config_json), config.seed);
  report["result"] = report::factor_payload(result);
  emit(report, args.output, args.format);
  if (!records_jsonl.empty()) {
    write_file(records_jsonl, serialize::to_json_lines(result.records));
  }
  return result.factors ? 0 : 2;
}

int cmd_state_dump(const CommonArgs& args, const std::string& stage_name) {
  const auto problem = resolve_problem(args);
  const auto stage =
      stage_name == "post-modexp" ? qstate::Stage::post_modexp : qstate::Stage::post_qft;
  const auto dense = qstate::dense_state(problem, stage);
  const u64 seed = resolve_seed(args.seed);

  json config_json{{"N", args.N},
                   {"A", problem.instance.A},
                   {"qubits", problem.n},
                   {"m_qubits", problem.m},
                   {"allow_small_register", args.allow_small},
                   {"stage", stage_name}};
  json report = report::envelope("state-dump", std::move(config_json), seed);
  report["state"] = serialize::to_json(dense);
  emit(report, args.output, args.format);
  return 0;
}

int cmd_distribution(const CommonArgs& args, bool support_only) {
  const auto problem = resolve_problem(args);
  if (problem.M > qstate::kMaterializeCap) {
    throw std::invalid_argument("distribution needs M <= 2^20; pass --qubits 20 or less");
  }
  const auto dist =
      qstate::qft_distribution(qstate::apply_modexp(qstate::prepare_uniform(problem)));
  const u64 seed = resolve_seed(args.seed);

  json config_json{{"N", args.N},
                   {"A", problem.instance.A},
                   {"qubits", problem.n},
                   {"m_qubits", problem.m},
                   {"allow_small_register", args.allow_small},
                   {"support_only", support_only}};
  json report = report::envelope("distribution", std::move(config_json), seed);
  report["summary"] = json{{"points", dist.points()},
                           {"support_size", dist.support().size()},
                           {"mass_total", dist.total_mass()}};
  const std::string csv = serialize::distribution_csv(dist, support_only);
  const std::string format = args.format == "text" && args.output.empty() ? "csv" : args.format;
  emit(report, args.output, format, csv);
  return 0;
}

int cmd_audit(bool run_all, std::vector<std::string> claims, u64 max_n, u64 trials,
              const std::vector<u64>& sweep_n, u64 sweep_trials, const std::string& sweep_csv_path,
              const std::optional<u64>& seed_flag, const std::string& output,
              const std::string& format) {
  audit::AuditConfig config;
  config.seed = resolve_seed(seed_flag);
  config.peak_bound_max_n = max_n;
  config.pow2form_max_n = max_n;
  config.rerun_trials = trials;
  if (!sweep_n.empty()) config.sweep_n_list = sweep_n;
  config.sweep_trials = sweep_trials;

  if (run_all) {
    claims = {"eq18", "eq19", "eq21", "peak_bound", "pow2form", "rerun", "sweep"};
  }
  if (claims.empty()) {
    throw std::invalid_argument("pass --all or at least one --claim");
  }

  std::vector<audit::ClaimReport> reports;
  std::vector<audit::SweepRow> sweep_rows;
  for (const auto& claim : claims) {
    if (claim == "eq18") {
      reports.push_back(audit::reproduce_eq18());
    } else if (claim == "eq19") {
      reports.push_back(audit::reproduce_eq19());
    } else if (claim == "eq21") {
      reports.push_back(audit::reproduce_eq21());
    } else if (claim == "peak_bound") {
      reports.push_back(audit::claim_peak_bound_sweep(config.peak_bound_max_n));
    } else if (claim == "pow2form") {
      reports.push_back(audit::claim_power_of_two_form(config.pow2form_max_n));
    } else if (claim == "rerun") {
      reports.push_back(audit::claim_rerun_probability(
          qstate::make_problem(numtheory::FactoringInstance(15, 7), 4, 4), config.rerun_trials,
          derive_seed(config.seed, 0xA11D17)));
    } else if (claim == "sweep") {
      std::vector<u64> skipped;
      sweep_rows = audit::success_sweep(config.sweep_n_list, config.sweep_strategy,
                                        config.sweep_trials, derive_seed(config.seed, 0x53EE9),
                                        &skipped);
      audit::ClaimReport sweep;
      sweep.claim_id = "sweep";
      sweep.paper_locus = "Sec. VI (success probability vs N)";
      sweep.verdict = audit::Verdict::inconclusive;
      sweep.evidence = json{{"rows", audit::sweep_rows_json(sweep_rows)},
                            {"skipped_over_cap", skipped}};
      sweep.trials = config.sweep_trials;
      sweep.seed = derive_seed(config.seed, 0x53EE9);
      reports.push_back(sweep);
    } else {
      throw std::invalid_argument("unknown claim id: " + claim);
    }
  }
  for (auto& report : reports) {
    if (report.seed == 0) report.seed = config.seed;
  }

  json config_json{{"claims", claims},
                   {"max_n", max_n},
                   {"trials", trials},
                   {"sweep_n", config.sweep_n_list},
                   {"sweep_trials", sweep_trials}};
  json report = report::envelope("audit", std::move(config_json), config.seed);
  report["result"] = report::audit_payload(reports);
  emit(report, output, format);
  if (!sweep_csv_path.empty()) {
    write_file(sweep_csv_path, report::csv_preamble(report) + audit::sweep_csv(sweep_rows));
  }
  return 0;  // verdicts are data, not process failures
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Shor order-finding simulator, strategy lab, and claims audit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs factor_args;
  std::string strategy = "standard";
  u64 max_runs = 20;
  u64 k = 3;
  std::string accumulate_source = "skip-qft";
  u64 shots = 10000;
  std::optional<double> fidelity;
  auto* factor = app.add_subcommand("factor", "run the algorithm until factors appear");
  add_common(factor, &factor_args, false);
  factor->add_option("--strategy", strategy, "run pipeline")
      ->check(
          CLI::IsMember({"standard", "output-first", "skip-qft", "accumulate", "nmr-ensemble"}));
  factor->add_option("--max-runs", max_runs, "run budget before giving up");
  factor->add_option("--k", k, "accumulate: runs summed into the auxiliary register");
  factor->add_option("--accumulate-source", accumulate_source, "accumulate addend source")
      ->check(CLI::IsMember({"standard", "skip-qft"}));
  factor->add_option("--shots", shots, "nmr-ensemble: shots per estimate");
  factor->add_option("--fidelity", fidelity, "per-qubit readout fidelity in [0.5, 1.0]");
  std::string records_jsonl;
  factor->add_option("--records-jsonl", records_jsonl, "also write run records as JSON-lines");

  CommonArgs dump_args;
  std::string stage = "post-qft";
  auto* dump = app.add_subcommand("state-dump", "dense amplitude dump (capped at 12 qubits)");
  add_common(dump, &dump_args, true);
  dump->add_option("--stage", stage, "pipeline stage")
      ->check(CLI::IsMember({"post-modexp", "post-qft"}));

  CommonArgs dist_args;
  bool support_only = false;
  auto* dist = app.add_subcommand("distribution", "exact post-QFT outcome distribution as CSV");
  add_common(dist, &dist_args, true);
  dist->add_flag("--support-only", support_only, "emit only outcomes with nonzero mass");

  bool audit_all = false;
  std::vector<std::string> audit_claims;
  u64 audit_max_n = 200;
  u64 audit_trials = 10000;
  std::vector<u64> audit_sweep_n;
  u64 audit_sweep_trials = 2000;
  std::string sweep_csv_path;
  std::optional<u64> audit_seed;
  std::string audit_output;
  std::string audit_format = "text";
  auto* audit_cmd = app.add_subcommand("audit", "reproduce worked examples and test claims");
  audit_cmd->add_flag("--all", audit_all, "run the whole claim registry");
  audit_cmd->add_option("--claim", audit_claims,
                        "claim id: eq18, eq19, eq21, peak_bound, pow2form, rerun, sweep");
  audit_cmd->add_option("--max-n", audit_max_n, "search cap for peak_bound and pow2form");
  audit_cmd->add_option("--trials", audit_trials, "trials for the rerun claim (>= 10^4)");
  audit_cmd->add_option("--sweep-n", audit_sweep_n, "N values for the success sweep");
  audit_cmd->add_option("--sweep-trials", audit_sweep_trials, "runs per sweep instance");
  audit_cmd->add_option("--sweep-csv", sweep_csv_path, "also write the sweep table as CSV");
  audit_cmd->add_option("--seed", audit_seed, "random seed (fallback: SHORLAB_SEED)");
  audit_cmd->add_option("--output", audit_output, "write the report bundle here");
  audit_cmd->add_option("--format", audit_format, "stdout format")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 1;
  }

  try {
    if (*factor) {
      return cmd_factor(factor_args, strategy, max_runs, k, accumulate_source, shots, fidelity,
                        records_jsonl);
    }
    if (*dump) {
      return cmd_state_dump(dump_args, stage);
    }
    if (*dist) {
      return cmd_distribution(dist_args, support_only);
    }
    return cmd_audit(audit_all, audit_claims, audit_max_n, audit_trials, audit_sweep_n,
                     audit_sweep_trials, sweep_csv_path, audit_seed, audit_output, audit_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

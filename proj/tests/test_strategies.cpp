#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <map>
#include <set>

#include "shorlab/serialize.hpp"
#include "shorlab/strategies.hpp"

using namespace shorlab;
using namespace shorlab::strategies;
using shorlab::numtheory::FactoringInstance;
using shorlab::qstate::make_problem;

namespace {

qstate::Problem problem_for(u64 N, u64 A, int n) {
  return make_problem(FactoringInstance(N, A), n);
}

void check_record_invariants(const RunRecord& record, u64 N) {
  REQUIRE_FALSE(record.factors.has_value() == record.failure.has_value());
  if (record.factors) {
    REQUIRE(N % record.factors->first == 0);
    REQUIRE(N % record.factors->second == 0);
  }
}

}  // namespace

TEST_CASE("run_standard on the 16-point worked instance") {
  const auto problem = problem_for(15, 7, 4);
  std::set<u64> seen;
  for (u64 seed = 0; seed < 400; ++seed) {
    const auto record = run_standard(problem, seed);
    check_record_invariants(record, 15);
    REQUIRE(record.samples.size() == 1);
    const u64 p = record.samples[0].value;
    seen.insert(p);
    REQUIRE((p == 0 || p == 4 || p == 8 || p == 12));
    if (p == 0) {
      REQUIRE(record.period_candidates.empty());
      REQUIRE(record.failure == FailureReason::indeterminate);
    } else {
      // every nonzero peak leads to the order 4 and the factors 3 x 5
      REQUIRE(record.factors.has_value());
      REQUIRE(std::min(record.factors->first, record.factors->second) == 3);
      REQUIRE(std::max(record.factors->first, record.factors->second) == 5);
    }
  }
  REQUIRE(seen.size() == 4);  // all four peaks show up across seeds
}

TEST_CASE("run_standard records the trivial-root failure for A = 14") {
  const auto problem = problem_for(15, 14, 8);
  bool saw_failure = false;
  for (u64 seed = 0; seed < 50 && !saw_failure; ++seed) {
    const auto record = run_standard(problem, seed);
    check_record_invariants(record, 15);
    if (record.samples[0].value == 0) continue;
    // candidates contain the true order 2, yet 14 = -1 mod 15 cannot factor
    bool has_two = false;
    for (const auto& c : record.period_candidates) has_two = has_two || c.r == 2;
    REQUIRE(has_two);
    REQUIRE_FALSE(record.factors.has_value());
    REQUIRE(record.failure == FailureReason::trivial_root);
    saw_failure = true;
  }
  REQUIRE(saw_failure);
}

TEST_CASE("run_output_first joint outcomes are uniform at 1/16") {
  const auto problem = problem_for(15, 7, 4);
  std::map<std::pair<u64, u64>, u64> joint;
  const u64 runs = 160000;
  for (u64 seed = 0; seed < runs; ++seed) {
    const auto record = run_output_first(problem, seed);
    check_record_invariants(record, 15);
    REQUIRE(record.samples.size() == 2);
    REQUIRE(record.samples[0].register_name == "output");
    REQUIRE(record.samples[1].register_name == "input");
    joint[{record.samples[0].value, record.samples[1].value}] += 1;
  }
  REQUIRE(joint.size() == 16);
  for (const auto& [key, count] : joint) {
    CAPTURE(key.first, key.second);
    REQUIRE(static_cast<double>(count) / static_cast<double>(runs) ==
            Approx(1.0 / 16.0).margin(0.008));
  }
}

TEST_CASE("run_output_first residues for the order-2 instance") {
  const auto problem = problem_for(15, 11, 4);
  std::map<u64, u64> residues;
  const u64 runs = 40000;
  for (u64 seed = 0; seed < runs; ++seed) {
    const auto record = run_output_first(problem, seed);
    residues[record.samples[0].value] += 1;
  }
  REQUIRE(residues.size() == 2);
  REQUIRE(static_cast<double>(residues[1]) / runs == Approx(0.5).margin(0.01));
  REQUIRE(static_cast<double>(residues[11]) / runs == Approx(0.5).margin(0.01));
}

TEST_CASE("measuring the output first leaves the input marginal unchanged") {
  // analytic identity: sum_l P(l) * P(p | l) = P(p), pointwise
  const struct {
    u64 N, A;
    int n;
  } cases[] = {{15, 7, 4}, {21, 2, 9}, {33, 2, 11}, {119, 3, 6}};
  for (const auto& c : cases) {
    const auto problem = problem_for(c.N, c.A, c.n);
    const auto state = qstate::apply_modexp(qstate::prepare_uniform(problem));
    const auto dist = qstate::qft_distribution(state);
    std::vector<double> marginal(problem.M, 0.0);
    for (const auto& b : state.branches) {
      if (b.count == 0) continue;
      const qstate::CollapsedBranch branch{b.offset, state.r, b.count, b.residue, state.M};
      const qstate::BranchDistribution conditional(branch);
      const double weight = static_cast<double>(b.count) / static_cast<double>(state.M);
      for (u64 p = 0; p < problem.M; ++p) marginal[p] += weight * conditional.mass(p);
    }
    for (u64 p = 0; p < problem.M; ++p) {
      CAPTURE(c.N, c.A, c.n, p);
      REQUIRE(marginal[p] == Approx(dist.mass(p)).margin(1e-9));
    }
  }
}

TEST_CASE("skip_qft outcomes are multiples of r") {
  const auto p15 = problem_for(15, 7, 4);
  std::set<u64> values;
  for (u64 seed = 0; seed < 2000; ++seed) {
    const auto record = run_skip_qft(p15, seed);
    check_record_invariants(record, 15);
    values.insert(record.samples[0].value);
  }
  REQUIRE(values == std::set<u64>{0, 4, 8, 12});

  const auto p256 = problem_for(15, 7, 8);
  std::set<u64> wide;
  for (u64 seed = 0; seed < 10000; ++seed) {
    const u64 v = run_skip_qft(p256, seed).samples[0].value;
    REQUIRE(v % 4 == 0);
    REQUIRE(v <= 252);
    wide.insert(v);
  }
  REQUIRE(wide.size() == 64);

  const auto p21 = problem_for(21, 2, 9);
  for (u64 seed = 0; seed < 3000; ++seed) {
    REQUIRE(run_skip_qft(p21, seed).samples[0].value % 6 == 0);
  }
}

TEST_CASE("skip_qft gcd inference across runs") {
  const auto problem = problem_for(15, 7, 4);
  // find a run that measures 12, then feed a prior sample of 8
  for (u64 seed = 0; seed < 200; ++seed) {
    const auto solo = run_skip_qft(problem, seed);
    if (solo.samples[0].value != 12) continue;
    const u64 prior[] = {8};
    const auto record = run_skip_qft(problem, seed, prior);
    // gcd(12, 8) = 4: candidates are its divisors, topped by the true order
    std::vector<u64> rs;
    for (const auto& c : record.period_candidates) {
      rs.push_back(c.r);
      REQUIRE(c.source == numtheory::CandidateSource::gcd_of_samples);
    }
    REQUIRE(rs == std::vector<u64>{1, 2, 4});
    REQUIRE(record.factors.has_value());
    return;
  }
  FAIL("no seed produced the sample 12");
}

TEST_CASE("skip_qft zero samples fall back to priors or indeterminate") {
  const auto problem = problem_for(15, 7, 4);
  for (u64 seed = 0; seed < 400; ++seed) {
    const auto record = run_skip_qft(problem, seed);
    if (record.samples[0].value != 0) continue;
    REQUIRE(record.failure == FailureReason::indeterminate);
    const u64 prior[] = {8, 12};
    const auto with_priors = run_skip_qft(problem, seed, prior);
    REQUIRE(with_priors.factors.has_value());  // priors alone pin r = 4
    return;
  }
  FAIL("no seed produced the sample 0");
}

TEST_CASE("accumulate sums stay congruent to zero mod r") {
  const auto problem = problem_for(15, 7, 4);
  for (u64 seed = 0; seed < 1000; ++seed) {
    const auto record = run_accumulate(problem, 3, AccumulateSource::skip_qft, seed);
    check_record_invariants(record, 15);
    REQUIRE(record.samples.size() == 1);
    REQUIRE(record.samples[0].register_name == "aux");
    const u64 sum = record.samples[0].value;
    REQUIRE(sum % 4 == 0);
    REQUIRE(sum <= 36);  // 3 addends of at most 12
  }
}

TEST_CASE("accumulate with k = 1 reduces to a single run") {
  const auto problem = problem_for(15, 7, 4);
  std::map<u64, u64> counts;
  const u64 runs = 40000;
  for (u64 seed = 0; seed < runs; ++seed) {
    counts[run_accumulate(problem, 1, AccumulateSource::skip_qft, seed).samples[0].value] += 1;
  }
  REQUIRE(counts.size() == 4);  // {0, 4, 8, 12} uniformly, like one skip-QFT run
  for (const auto& [value, count] : counts) {
    REQUIRE(value % 4 == 0);
    REQUIRE(static_cast<double>(count) / runs == Approx(0.25).margin(0.01));
  }
}

TEST_CASE("accumulate mean over many standard-source addends") {
  const auto problem = problem_for(15, 7, 4);
  const auto record = run_accumulate(problem, 10000, AccumulateSource::standard, 2024);
  const double mean = static_cast<double>(record.samples[0].value) / 10000.0;
  REQUIRE(mean == Approx(6.0).margin(0.1));  // mean of {0, 4, 8, 12}
  REQUIRE(record.samples[0].bits == 4 + 14);
}

TEST_CASE("accumulate rejects a zero run count") {
  CHECK_THROWS_AS(run_accumulate(problem_for(15, 7, 4), 0, AccumulateSource::skip_qft, 1),
                  std::invalid_argument);
}

TEST_CASE("nmr ensemble recovers the worked periods") {
  const auto seven = run_nmr_ensemble(problem_for(15, 7, 3), 10000, 42);
  REQUIRE(seven.bit_means.size() == 3);
  CHECK(seven.bit_means[0] == 0.0);  // low bit never set on {0, 2, 4, 6}
  CHECK(seven.variable_bits == 2);
  CHECK(seven.r_estimate == 4);
  CHECK(seven.verified);

  const auto eleven = run_nmr_ensemble(problem_for(15, 11, 3), 10000, 42);
  CHECK(eleven.variable_bits == 1);
  CHECK(eleven.r_estimate == 2);
  CHECK(eleven.verified);

  const auto big = run_nmr_ensemble(problem_for(119, 92, 14), 10000, 42);
  CHECK(big.variable_bits == 4);
  CHECK(big.r_estimate == 16);
  CHECK(big.verified);
  for (int b = 0; b < 10; ++b) CHECK(big.bit_means[b] == 0.0);  // fixed low bits
  for (double mean : big.bit_means) {
    CHECK(mean >= 0.0);
    CHECK(mean <= 1.0);
  }
}

TEST_CASE("records replay byte-for-byte from their seed") {
  const auto problem = problem_for(21, 2, 9);
  for (u64 seed : {u64{1}, u64{77}, u64{123456}}) {
    const auto a = serialize::to_json(run_standard(problem, seed)).dump();
    const auto b = serialize::to_json(run_standard(problem, seed)).dump();
    REQUIRE(a == b);
    const auto c = serialize::to_json(run_output_first(problem, seed)).dump();
    const auto d = serialize::to_json(run_output_first(problem, seed)).dump();
    REQUIRE(c == d);
  }
  REQUIRE(serialize::to_json(run_standard(problem, 1)).dump() !=
          serialize::to_json(run_standard(problem, 2)).dump());
}

TEST_CASE("perfect-fidelity readout leaves records unchanged") {
  const auto problem = problem_for(15, 7, 4);
  RunOptions perfect;
  perfect.readout = noise::ReadoutModel(1.0);
  for (u64 seed = 0; seed < 50; ++seed) {
    REQUIRE(serialize::to_json(run_standard(problem, seed)).dump() ==
            serialize::to_json(run_standard(problem, seed, perfect)).dump());
  }
}

TEST_CASE("noisy readout perturbs the measured registers only") {
  const auto problem = problem_for(15, 7, 8);
  RunOptions noisy;
  noisy.readout = noise::ReadoutModel(0.7);
  bool saw_off_peak = false;
  for (u64 seed = 0; seed < 300; ++seed) {
    const auto record = run_standard(problem, seed, noisy);
    check_record_invariants(record, 15);
    REQUIRE(record.samples[0].value < 256);  // flips stay inside the register
    if (record.samples[0].value % 64 != 0) saw_off_peak = true;
  }
  REQUIRE(saw_off_peak);  // F = 0.7 on 8 qubits flips something quickly
}

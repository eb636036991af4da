#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <complex>
#include <map>
#include <set>
#include <vector>

#include "shorlab/qstate.hpp"

using namespace shorlab;
using namespace shorlab::qstate;
using shorlab::numtheory::FactoringInstance;

namespace {

/*
 * Independent oracle built straight from the definitions: residues by
 * iterative multiplication, then for each outcome p accumulate the phase
 * e^{2 pi i p j / M} per residue and sum the squared magnitudes. Shares no
 * structure with the branch representation under test.
 */
std::vector<double> naive_qft_distribution(u64 N, u64 A, int n) {
  const u64 M = u64{1} << n;
  std::vector<u64> residue(M);
  u64 value = 1 % N;
  std::set<u64> distinct;
  for (u64 j = 0; j < M; ++j) {
    residue[j] = value;
    distinct.insert(value);
    value = mulmod(value, A, N);
  }
  std::vector<std::complex<double>> acc(N, {0.0, 0.0});
  std::vector<double> out(M, 0.0);
  for (u64 p = 0; p < M; ++p) {
    for (u64 f : distinct) acc[f] = {0.0, 0.0};
    for (u64 j = 0; j < M; ++j) {
      const u64 t = static_cast<u64>(static_cast<u128>(p) * j % M);
      const double angle = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(M);
      acc[residue[j]] += std::complex<double>{std::cos(angle), std::sin(angle)};
    }
    double total = 0.0;
    for (u64 f : distinct) total += std::norm(acc[f]);
    out[p] = total / (static_cast<double>(M) * static_cast<double>(M));
  }
  return out;
}

Problem problem_for(u64 N, u64 A, int n) {
  return make_problem(FactoringInstance(N, A), n);
}

}  // namespace

TEST_CASE("prepare_uniform is the flat superposition") {
  const auto four = prepare_uniform(problem_for(15, 7, 4));
  CHECK(four.count() == 16);
  CHECK(four.amplitude() == Approx(0.25).epsilon(1e-14));

  const auto one = prepare_uniform(make_problem(FactoringInstance(15, 7), 1));
  CHECK(one.count() == 2);
  CHECK(one.amplitude() == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  const auto eight = prepare_uniform(problem_for(15, 7, 8));
  CHECK(static_cast<double>(eight.count()) * eight.amplitude() * eight.amplitude() ==
        Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_modexp builds the branch decomposition") {
  const auto state = apply_modexp(prepare_uniform(problem_for(15, 7, 4)));
  REQUIRE(state.r == 4);
  REQUIRE(state.branches.size() == 4);
  const u64 residues[4] = {1, 7, 4, 13};
  for (u64 l = 0; l < 4; ++l) {
    CHECK(state.branches[l].offset == l);
    CHECK(state.branches[l].count == 4);  // s_l = 3 on every branch
    CHECK(state.branches[l].residue == residues[l]);
  }

  const auto small = apply_modexp(prepare_uniform(problem_for(15, 7, 3)));
  for (const auto& b : small.branches) CHECK(b.count == 2);

  const auto odd = apply_modexp(prepare_uniform(problem_for(21, 2, 9)));
  REQUIRE(odd.r == 6);
  u64 total = 0;
  for (const auto& b : odd.branches) total += b.count;
  CHECK(total == 512);
}

TEST_CASE("branch counts partition the register for every problem") {
  for (u64 N = 5; N <= 512; N += 2) {
    u64 A = 0;
    for (u64 a = 2; a < N; ++a) {
      if (std::gcd(a, N) == 1) {
        A = a;
        break;
      }
    }
    if (A == 0) continue;
    for (int n = 2; n <= 20; ++n) {
      const auto state = apply_modexp(prepare_uniform(problem_for(N, A, n)));
      u64 total = 0;
      std::set<u64> residues;
      for (const auto& b : state.branches) {
        total += b.count;
        residues.insert(b.residue);
      }
      CAPTURE(N, A, n);
      REQUIRE(total == u64{1} << n);
      REQUIRE(residues.size() == state.r);  // the r residues are distinct
    }
  }
}

TEST_CASE("qft_distribution worked supports") {
  const struct {
    int n;
    std::vector<u64> support;
  } cases[] = {
      {4, {0, 4, 8, 12}},
      {5, {0, 8, 16, 24}},
      {3, {0, 2, 4, 6}},
  };
  for (const auto& c : cases) {
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(15, 7, c.n))));
    REQUIRE(dist.support() == c.support);
    for (u64 p : c.support) {
      REQUIRE(dist.mass(p) == Approx(0.25).margin(1e-12));
    }
    for (u64 p = 0; p < dist.points(); ++p) {
      if (std::find(c.support.begin(), c.support.end(), p) == c.support.end()) {
        REQUIRE(dist.mass(p) <= 1e-12);
      }
    }
  }
}

TEST_CASE("closed form equals the brute-force evaluation") {
  const struct {
    u64 N, A;
    int n;
  } cases[] = {
      {21, 2, 9},    // r = 6, does not divide M
      {15, 7, 4},    // r = 4 divides M
      {33, 2, 8},    // r = 10
      {35, 2, 9},    // r = 12
      {119, 92, 7},  // r = 16 against a small register
      {55, 2, 10},   // r = 20
      {57, 5, 8},    // r = 18
      {119, 3, 6},   // r = 30 > M, single-element branches
  };
  for (const auto& c : cases) {
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(c.N, c.A, c.n))));
    const auto oracle = naive_qft_distribution(c.N, c.A, c.n);
    CAPTURE(c.N, c.A, c.n);
    for (u64 p = 0; p < dist.points(); ++p) {
      REQUIRE(dist.mass(p) == Approx(oracle[p]).margin(1e-9));
    }
  }
}

TEST_CASE("distribution normalizes to one") {
  const struct {
    u64 N, A;
    int n;
  } cases[] = {{15, 7, 4}, {15, 7, 12}, {21, 2, 9}, {119, 92, 14}, {119, 3, 6}, {255, 2, 16}};
  for (const auto& c : cases) {
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(c.N, c.A, c.n))));
    CAPTURE(c.N, c.A, c.n);
    REQUIRE(dist.total_mass() == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("dividing period concentrates exactly on the r peaks") {
  const struct {
    u64 N, A;
    int n;
    u64 r;
  } cases[] = {{15, 7, 4, 4}, {15, 7, 8, 4}, {15, 11, 3, 2}, {119, 92, 14, 16}};
  for (const auto& c : cases) {
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(c.N, c.A, c.n))));
    REQUIRE(dist.peaks_exact());
    const u64 M = dist.points();
    REQUIRE(dist.support().size() == c.r);
    for (u64 lambda = 0; lambda < c.r; ++lambda) {
      REQUIRE(dist.support()[lambda] == lambda * (M / c.r));
      REQUIRE(dist.mass(lambda * (M / c.r)) ==
              Approx(1.0 / static_cast<double>(c.r)).margin(1e-12));
    }
  }
}

TEST_CASE("power-of-two periods zero the low output bits") {
  const struct {
    u64 N, A;
    int n;
    int fixed_bits;  // register bits minus K
  } cases[] = {{15, 7, 4, 2}, {15, 7, 5, 3}, {15, 11, 3, 2}, {119, 92, 14, 10}};
  for (const auto& c : cases) {
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(c.N, c.A, c.n))));
    const u64 low_mask = (u64{1} << c.fixed_bits) - 1;
    for (u64 p : dist.support()) REQUIRE((p & low_mask) == 0);
  }
}

TEST_CASE("dense post-modexp state matches the grouped expansion") {
  const auto dense = dense_state(problem_for(15, 7, 4), Stage::post_modexp);
  REQUIRE(dense.entries.size() == 16);
  std::map<u64, std::vector<u64>> groups;
  for (const auto& e : dense.entries) {
    REQUIRE(e.amplitude.real() == Approx(0.25).margin(1e-12));
    REQUIRE(e.amplitude.imag() == Approx(0.0).margin(1e-12));
    groups[e.f].push_back(e.x);
  }
  REQUIRE(groups[1] == std::vector<u64>{0, 4, 8, 12});
  REQUIRE(groups[7] == std::vector<u64>{1, 5, 9, 13});
  REQUIRE(groups[4] == std::vector<u64>{2, 6, 10, 14});
  REQUIRE(groups[13] == std::vector<u64>{3, 7, 11, 15});
}

TEST_CASE("dense post-QFT state carries the phase pattern") {
  const auto dense = dense_state(problem_for(15, 7, 4), Stage::post_qft);
  REQUIRE(dense.entries.size() == 16);
  std::map<std::pair<u64, u64>, std::complex<double>> amp;
  for (const auto& e : dense.entries) amp[{e.x, e.f}] = e.amplitude;
  CHECK(std::abs(amp[{4, 7}] - std::complex<double>{0.0, 0.25}) < 1e-12);
  CHECK(std::abs(amp[{12, 13}] - std::complex<double>{0.0, 0.25}) < 1e-12);
  CHECK(std::abs(amp[{8, 4}] - std::complex<double>{0.25, 0.0}) < 1e-12);
  CHECK(std::abs(amp[{12, 7}] - std::complex<double>{0.0, -0.25}) < 1e-12);
  CHECK(std::abs(amp[{0, 1}] - std::complex<double>{0.25, 0.0}) < 1e-12);
}

TEST_CASE("dense states are normalized and capped") {
  const struct {
    u64 N, A;
    int n;
  } cases[] = {{15, 7, 4}, {15, 11, 3}, {21, 2, 9}, {33, 2, 7}};
  for (const auto& c : cases) {
    for (auto stage : {Stage::post_modexp, Stage::post_qft}) {
      const auto dense = dense_state(problem_for(c.N, c.A, c.n), stage);
      double total = 0.0;
      for (const auto& e : dense.entries) total += std::norm(e.amplitude);
      CAPTURE(c.N, c.A, c.n, static_cast<int>(stage));
      REQUIRE(total == Approx(1.0).margin(1e-12));
    }
  }

  const auto two_residues = dense_state(problem_for(15, 11, 3), Stage::post_modexp);
  REQUIRE(two_residues.entries.size() == 8);
  std::set<u64> residues;
  for (const auto& e : two_residues.entries) residues.insert(e.f);
  REQUIRE(residues == std::set<u64>{1, 11});

  CHECK_THROWS_AS(dense_state(problem_for(15, 7, 13), Stage::post_modexp), std::domain_error);
}

TEST_CASE("dense post-QFT marginal equals the closed-form distribution") {
  const struct {
    u64 N, A;
    int n;
  } cases[] = {{15, 7, 4}, {21, 2, 8}, {33, 2, 7}, {119, 3, 6}};
  for (const auto& c : cases) {
    const auto dense = dense_state(problem_for(c.N, c.A, c.n), Stage::post_qft);
    const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(c.N, c.A, c.n))));
    std::vector<double> marginal(dist.points(), 0.0);
    for (const auto& e : dense.entries) marginal[e.x] += std::norm(e.amplitude);
    for (u64 p = 0; p < dist.points(); ++p) {
      CAPTURE(c.N, c.A, c.n, p);
      REQUIRE(marginal[p] == Approx(dist.mass(p)).margin(1e-12));
    }
  }
}

TEST_CASE("measure_input follows the exact distribution") {
  const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(15, 7, 4))));
  Rng rng(424242);
  std::map<u64, u64> counts;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) ++counts[measure_input(dist, rng)];
  REQUIRE(counts.size() == 4);
  for (u64 p : {u64{0}, u64{4}, u64{8}, u64{12}}) {
    REQUIRE(static_cast<double>(counts[p]) / samples == Approx(0.25).margin(0.01));
  }
}

TEST_CASE("a point-mass distribution always returns its point") {
  PeriodicState synthetic;
  synthetic.M = 16;
  synthetic.r = 1;
  synthetic.N = 15;
  synthetic.A = 1;
  synthetic.branches = {{0, 16, 1}};
  const auto dist = qft_distribution(synthetic);
  REQUIRE(dist.mass(0) == Approx(1.0).margin(1e-12));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) REQUIRE(measure_input(dist, rng) == 0);
}

TEST_CASE("the 119 register samples on the 1024-spaced peaks") {
  const auto dist = qft_distribution(apply_modexp(prepare_uniform(problem_for(119, 92, 14))));
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const u64 p = measure_input(dist, rng);
    REQUIRE(p % 1024 == 0);
    REQUIRE(p <= 15360);
  }
}

TEST_CASE("measure_output_first picks branches by their weight") {
  const auto state = apply_modexp(prepare_uniform(problem_for(15, 7, 3)));
  for (const auto& b : state.branches) {
    REQUIRE(static_cast<double>(b.count) / static_cast<double>(state.M) ==
            Approx(2.0 / 8.0).margin(1e-15));
  }
  Rng rng(31337);
  std::map<u64, u64> counts;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) ++counts[measure_output_first(state, rng).residue];
  REQUIRE(counts.size() == 4);
  for (const auto& [residue, count] : counts) {
    CAPTURE(residue);
    REQUIRE(static_cast<double>(count) / samples == Approx(0.25).margin(0.01));
  }
}

TEST_CASE("collapsed branches only hold their own residue class") {
  const auto state = apply_modexp(prepare_uniform(problem_for(21, 2, 9)));
  Rng rng(8);
  for (int i = 0; i < 3000; ++i) {
    const auto branch = measure_output_first(state, rng);
    const u64 value = branch.sample_value(rng);
    REQUIRE(value % state.r == branch.l);
    REQUIRE(value < state.M);
  }
}

TEST_CASE("branch-conditional QFT distribution is normalized and peaked") {
  const auto state = apply_modexp(prepare_uniform(problem_for(15, 7, 4)));
  Rng rng(17);
  const auto branch = measure_output_first(state, rng);
  const BranchDistribution conditional(branch);
  double total = 0.0;
  for (u64 p = 0; p < state.M; ++p) total += conditional.mass(p);
  REQUIRE(total == Approx(1.0).margin(1e-9));
  for (u64 p : {u64{0}, u64{4}, u64{8}, u64{12}}) {
    REQUIRE(conditional.mass(p) == Approx(0.25).margin(1e-12));
  }
}

TEST_CASE("problem construction validates register sizes") {
  CHECK(make_problem(FactoringInstance(15, 7)).n == 8);  // sizing-rule default
  CHECK(make_problem(FactoringInstance(15, 7)).m == 4);  // smallest register holding residues
  CHECK(make_problem(FactoringInstance(119, 92)).n == 14);
  CHECK(make_problem(FactoringInstance(119, 92)).m == 7);
  CHECK_THROWS_AS(make_problem(FactoringInstance(15, 7), 4, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(FactoringInstance(15, 7), 0), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(FactoringInstance(15, 7), 62), std::invalid_argument);
}

TEST_CASE("large registers stay pointwise-evaluable; tables are capped") {
  // r divides M: peak sampling and support need no table at any size
  Distribution peaks(u64{1} << 30, 4);
  REQUIRE(peaks.peaks_exact());
  REQUIRE(peaks.support().size() == 4);
  Rng rng(3);
  REQUIRE(peaks.sample(rng) % (u64{1} << 28) == 0);
  REQUIRE(peaks.total_mass() == Approx(1.0).margin(1e-12));

  // r does not divide M: above the cap only pointwise evaluation remains
  Distribution wide(u64{1} << 22, 3);
  REQUIRE_FALSE(wide.peaks_exact());
  CHECK(wide.mass(0) > 0.0);
  CHECK_THROWS_AS(wide.support(), std::domain_error);
  CHECK_THROWS_AS(wide.sample(rng), std::domain_error);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "udcran/oracle.hpp"

using namespace udcran;
using fixtures::handInstance;

TEST_CASE("one RRH, one user, one subcarrier is water-filling") {
  // B/N = 1, sigma^2 = 1, g = 4, Pbar = 2, R huge: optimum spends the full budget.
  const auto inst = handInstance(1, 1, 1, {4.0}, {1e12}, 1.0, {2.0});
  const auto bf = oracle::bruteForceWsr(inst);
  CHECK(bf.wsr == doctest::Approx(std::log2(9.0)).epsilon(1e-6));
  CHECK(bf.assignmentDualBound >= bf.wsr * (1 - 1e-9));

  // Tight fronthaul: R = 1 caps the rate at 1 bit/s.
  const auto capped = handInstance(1, 1, 1, {4.0}, {1.0}, 1.0, {2.0});
  CHECK(oracle::bruteForceWsr(capped).wsr == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("spg matches the closed-form single-RRH maximiser") {
  const auto inst = handInstance(1, 1, 1, {4.0}, {1.0});
  const auto p = oracle::concaveFixedSelectionMax(inst, 0, 0, RrhSet::single(0), 0.0, {0.5});
  CHECK(p[0] == doctest::Approx(1.0 / (0.5 * std::numbers::ln2) - 0.25).epsilon(1e-6));
}

TEST_CASE("zero gains give zero rate") {
  const auto inst = handInstance(2, 2, 2, std::vector<double>(8, 0.0), {1.0, 1.0});
  CHECK(oracle::bruteForceWsr(inst).wsr == 0.0);
}

TEST_CASE("non-concave settings are rejected") {
  const auto inst = handInstance(1, 1, 1, {4.0}, {1.0});
  CHECK_THROWS_AS(oracle::concaveFixedSelectionMax(inst, 0, 0, RrhSet::single(0), 2.0, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(oracle::concaveFixedSelectionMax(inst, 0, 0, RrhSet::single(0), 0.0, {0.0}),
                  std::invalid_argument);
}

TEST_CASE("size guard") {
  CHECK(oracle::assignmentCount({2, 2, 3}) == doctest::Approx(std::pow(2 * 3, 3)));
  SystemDims d;
  d.rrhs = 4;
  d.users = 4;
  d.subcarriers = 6;
  const NetworkInstance big(d, std::vector<double>(96, 1.0), std::vector<double>(4, 1.0), 1.0,
                            std::vector<double>(4, 1.0), std::vector<double>(4, 1.0));
  CHECK_THROWS_AS(oracle::bruteForceWsr(big), std::invalid_argument);
  for (std::uint64_t s = 0; s < 50; ++s) {
    CHECK(oracle::assignmentCount(oracle::randomTinySpec(s)) <= oracle::kMaxAssignments);
  }
}

TEST_CASE("submodularity holds with equality without fronthaul price") {
  const auto inst = fixtures::generated(5, 2, 4, 17);
  std::mt19937_64 rng(2);
  DualPoint d = fixtures::randomDual(inst, rng);
  const auto rep = oracle::submodularityCheck(inst, 1, 0, 0.0, d.mu);
  CHECK(rep.passed());
  CHECK(rep.triplesChecked > 0);
  CHECK(rep.strictTriples == 0);
}

TEST_CASE("submodularity is strict on a hand instance") {
  // Unit gains and rates; lambda = 0.2, mu = 1.
  const auto inst = handInstance(3, 1, 1, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  const auto rep = oracle::submodularityCheck(inst, 0, 0, 0.2, {1.0, 1.0, 1.0});
  CHECK(rep.passed());
  CHECK(rep.strictTriples > 0);
}

TEST_CASE("brute force agrees with a power grid") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = oracle::tinyInstance({2, 1, 2}, seed);
    const double bf = oracle::bruteForceWsr(inst).wsr;
    const double grid = oracle::gridWsr(inst, 41);
    CHECK(grid <= bf * (1 + 1e-6));
    CHECK(grid >= bf * 0.97);
  }
}

TEST_CASE("brute-force allocation is feasible and consistent") {
  for (std::uint64_t seed = 5; seed < 10; ++seed) {
    const auto inst = oracle::tinyInstance(oracle::randomTinySpec(seed), seed);
    const auto bf = oracle::bruteForceWsr(inst);
    CHECK(isFeasible(inst, bf.allocation));
    CHECK(weightedSumRate(inst, bf.allocation) == doctest::Approx(bf.wsr).epsilon(1e-9));
    CHECK(bf.evaluated <= bf.assignments);
    CHECK(bf.assignmentDualBound >= bf.wsr * (1 - 1e-9));
  }
}

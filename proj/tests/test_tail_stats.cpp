#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "treelab/ce_sim.hpp"
#include "treelab/formulas.hpp"
#include "treelab/rng.hpp"
#include "treelab/tail_stats.hpp"

using namespace treelab;

namespace {

// Exact Pareto(gamma) on [1, inf): u^{-1/gamma} with u uniform in (0,1).
std::vector<double> pareto_samples(double gamma, std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, kStreamChildCount);
  std::vector<double> xs(n);
  for (auto& x : xs) x = std::pow(rng.next_unit(), -1.0 / gamma);
  return xs;
}

}  // namespace

TEST_SUITE("tail_stats") {

TEST_CASE("hill recovers a synthetic pareto exponent") {
  const auto xs = pareto_samples(2.4, 1'000'000, 41);
  const auto est = hill_exponent(std::span<const double>(xs), 10000);
  CHECK(std::abs(est.exponent - 2.4) < 0.1);
  CHECK(est.k_used == 10000);
  CHECK(est.stderr_ == doctest::Approx(est.exponent / 100.0));
}

TEST_CASE("hill coverage across exponents") {
  // |estimate - gamma| < 3 stderr in at least 95 of 100 repetitions
  for (double gamma : {1.5, 2.4, 5.0}) {
    int covered = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      const auto xs = pareto_samples(gamma, 20000, trial_key(42, rep));
      const auto est = hill_exponent(std::span<const double>(xs), default_hill_k(xs.size()));
      if (std::abs(est.exponent - gamma) < 3.0 * est.stderr_) ++covered;
    }
    CHECK(covered >= 95);
  }
}

TEST_CASE("hill input validation") {
  std::vector<double> constant(2000, 7.0);
  CHECK_THROWS_AS(hill_exponent(std::span<const double>(constant), 100), std::invalid_argument);
  std::vector<double> tiny(30, 1.0);
  CHECK_THROWS_AS(hill_exponent(std::span<const double>(tiny), 25), std::invalid_argument);
  CHECK_THROWS_AS(hill_exponent(std::span<const double>(constant), 5), std::invalid_argument);
  const std::vector<std::uint64_t> ints = {5, 1, 9, 2, 2};
  CHECK_THROWS_AS(hill_exponent(std::span<const std::uint64_t>(ints), 10), std::invalid_argument);
}

TEST_CASE("hill carries the capped fraction through") {
  const auto xs = pareto_samples(2.0, 5000, 43);
  const auto est = hill_exponent(std::span<const double>(xs), 100, 0.125);
  CHECK(est.capped_fraction == doctest::Approx(0.125));
}

TEST_CASE("robust mean") {
  SUBCASE("constant input gives a zero-width interval") {
    std::vector<double> xs(1000, 3.25);
    const auto rm = robust_mean(std::span<const double>(xs), 50);
    CHECK(rm.estimate == doctest::Approx(3.25));
    CHECK(rm.ci_hi - rm.ci_lo == doctest::Approx(0.0));
  }
  SUBCASE("agrees with the arithmetic mean on light-tailed input") {
    CounterRng rng(44, kStreamRecovery);
    std::vector<double> xs(200000);
    double mean = 0.0;
    for (auto& x : xs) {
      x = rng.next_exp(1.0);
      mean += x;
    }
    mean /= static_cast<double>(xs.size());
    const auto rm = robust_mean(std::span<const double>(xs), 50);
    CHECK(rm.ci_lo <= mean);
    CHECK(rm.ci_hi >= mean);
    CHECK(std::abs(rm.estimate - 1.0) < 0.02);
  }
  SUBCASE("validation") {
    std::vector<double> xs(10, 1.0);
    CHECK_THROWS_AS(robust_mean(std::span<const double>(xs), 2), std::invalid_argument);
    CHECK_THROWS_AS(robust_mean(std::span<const double>(xs), 11), std::invalid_argument);
  }
}

TEST_CASE("default window grows like n^(2/3)") {
  CHECK(default_hill_k(1'000'000) == 10000);
  CHECK(default_hill_k(8000) == 400);
  CHECK(default_hill_k(20) >= 10);
}


// Progeny means near the critical intensity: the tail exponent drops toward
// 1, the interval blows up, and the point estimate carries the slow
// tail-truncation bias of any finite sample from an infinite-variance law.
TEST_CASE("progeny robust mean near criticality") {
  const ChildLaw law = ChildLaw::regular(2);
  SimLimits lim;
  lim.vertex_budget = 50'000'000;
  const auto calm = sample_progeny(law, 0.10, 300000, lim, 91, 2);
  const auto wild = sample_progeny(law, 0.17, 300000, lim, 92, 2);
  const auto rm_calm = robust_mean(std::span<const std::uint64_t>(calm.values), 50);
  const auto rm_wild = robust_mean(std::span<const std::uint64_t>(wild.values), 50);
  const double want_calm = mean_progeny(0.10, 2.0);
  const double want_wild = mean_progeny(0.17, 2.0);
  CHECK(want_calm >= rm_calm.ci_lo);
  CHECK(want_calm <= rm_calm.ci_hi);
  // interval widens by an order of magnitude approaching lambda1
  CHECK(rm_wild.ci_hi - rm_wild.ci_lo > 5.0 * (rm_calm.ci_hi - rm_calm.ci_lo));
  // the closed form sits within a few interval widths of the estimate
  const double half = 0.5 * (rm_wild.ci_hi - rm_wild.ci_lo);
  CHECK(std::abs(rm_wild.estimate - want_wild) < 3.0 * std::max(half, 0.02));
}

}  // TEST_SUITE

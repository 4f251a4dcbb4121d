#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "treelab/ce_sim.hpp"
#include "treelab/formulas.hpp"
#include "treelab/rng.hpp"

using namespace treelab;

namespace {

// Test-local re-implementation of the infection criterion: enumerate the
// infected set over an explicitly materialized tree, vertex by vertex, from
// the same keyed clocks the simulator uses. Vertices appear in BFS order,
// so parents are decided before children.
std::vector<char> infected_set(const TreeStream& stream, const FiniteTree& tree,
                               double lambda, std::optional<double> root_override = {}) {
  const std::size_t n = tree.size();
  std::vector<std::uint64_t> keys(n);
  std::vector<double> sum_xi(n, 0.0), sum_d(n, 0.0);
  std::vector<char> infected(n, 0);
  keys[0] = stream.root_key();
  sum_d[0] = root_override ? *root_override : unit_exp_draw(keys[0], kStreamRecovery);
  infected[0] = 1;
  for (std::size_t v = 1; v < n; ++v) {
    const auto p = static_cast<std::size_t>(tree.parent(v));
    keys[v] = child_key(keys[p], tree.sibling_index(v));
    if (!infected[p]) continue;
    const double xi = unit_exp_draw(keys[v], kStreamInfection) / lambda;
    if (sum_xi[p] + xi < sum_d[p]) {
      infected[v] = 1;
      sum_xi[v] = sum_xi[p] + xi;
      sum_d[v] = sum_d[p] + unit_exp_draw(keys[v], kStreamRecovery);
    }
  }
  return infected;
}

}  // namespace

TEST_SUITE("ce_sim") {

TEST_CASE("run_trial agrees with an independent enumeration of the infected set") {
  const auto law = ChildLaw::parse("0:0.25,2:0.75");
  SimLimits lim;
  lim.depth_limit = 9;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const TreeStream stream(law, trial_key(900, i));
    const auto tree = truncate(stream, 9);
    const auto set = infected_set(stream, tree, 0.7);
    std::uint64_t z = 0;
    std::uint32_t deepest = 0;
    for (std::size_t v = 0; v < tree.size(); ++v)
      if (set[v]) {
        ++z;
        deepest = std::max(deepest, tree.depth(v));
      }
    const auto out = run_trial(stream, 0.7, lim);
    CHECK(out.progeny == z);
    CHECK(out.max_depth == deepest);
  }
}

TEST_CASE("coupling: the infected set at lower lambda is a subset") {
  const auto law = ChildLaw::parse("0:0.25,2:0.75");
  for (std::uint64_t i = 0; i < 3000; ++i) {
    const TreeStream stream(law, trial_key(901, i));
    const auto tree = truncate(stream, 9);
    const auto hot = infected_set(stream, tree, 0.8);
    const auto cold = infected_set(stream, tree, 0.4);
    for (std::size_t v = 0; v < tree.size(); ++v)
      if (cold[v]) CHECK(hot[v]);
  }
}

TEST_CASE("vanishing intensity infects nobody") {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto out = run_trial(law, 1e-9, lim, trial_key(100, i));
    CHECK(out.progeny == 1);
    CHECK(out.max_depth == 0);
    CHECK(out.extinct_within_limits);
  }
}

TEST_CASE("single-child chain wins the first race with odds lambda/(1+lambda)") {
  const auto law = ChildLaw::regular(1);
  const auto p = estimate_survival(law, 1.0, 1, 100000, 101, 2);
  CHECK(std::abs(p.estimate - 0.5) < 0.005);
  // the Wilson interval brackets its own point estimate
  CHECK(p.ci_lo <= p.estimate);
  CHECK(p.ci_hi >= p.estimate);
}

TEST_CASE("no infection beyond the root has probability 1/(1+d lambda)") {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  std::uint64_t ones = 0;
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i)
    ones += run_trial(law, 0.1, lim, trial_key(102, i)).progeny == 1;
  CHECK(std::abs(static_cast<double>(ones) / static_cast<double>(n) - 1.0 / 1.2) < 0.004);
}

TEST_CASE("mean progeny matches the closed form") {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  const auto s = sample_progeny(law, 0.1, 200000, lim, 103, 2);
  REQUIRE(s.capped_trials == 0);
  double mean = 0.0;
  for (auto v : s.values) mean += static_cast<double>(v);
  mean /= static_cast<double>(s.values.size());
  CHECK(std::abs(mean - mean_progeny(0.1, 2.0)) < 0.01);
}

TEST_CASE("root recovery override") {
  const auto law = ChildLaw::regular(2);
  SUBCASE("t = 0 freezes the epidemic at the root") {
    SimLimits lim;
    lim.root_recovery_override = 0.0;
    for (std::uint64_t i = 0; i < 5000; ++i)
      CHECK(run_trial(law, 0.9, lim, trial_key(104, i)).progeny == 1);
  }
  SUBCASE("t = 1 reproduces the conditional mean profile") {
    SimLimits lim;
    lim.root_recovery_override = 1.0;
    const auto s = sample_progeny(law, 0.1, 200000, lim, 105, 2);
    double mean = 0.0;
    for (auto v : s.values) mean += static_cast<double>(v);
    mean /= static_cast<double>(s.values.size());
    CHECK(std::abs(mean - mean_profile(0.1, 2.0, 1.0)) < 0.01);
  }
}

TEST_CASE("subcritical 4-ary tree never reaches depth 60") {
  // lambda = 0.03 sits below lambda1(4) = 7 - 4 sqrt(3)
  const auto p = estimate_survival(ChildLaw::regular(4), 0.03, 60, 10000, 112, 2);
  CHECK(p.estimate == 0.0);
}

TEST_CASE("supercritical binary tree reaches depth 60 more often than not") {
  const auto p = estimate_survival(ChildLaw::regular(2), 0.9, 60, 10000, 113, 2);
  CHECK(p.estimate > 0.5);
}

TEST_CASE("depth-reach estimates decrease with depth on shared seeds") {
  const auto law = ChildLaw::regular(2);
  const auto p10 = estimate_survival(law, 0.5, 10, 20000, 106, 2);
  const auto p25 = estimate_survival(law, 0.5, 25, 20000, 106, 2);
  const auto p60 = estimate_survival(law, 0.5, 60, 20000, 106, 2);
  CHECK(p60.estimate <= p25.estimate);
  CHECK(p25.estimate <= p10.estimate);
}

TEST_CASE("coupling: lowering lambda shrinks the infected set trial by trial") {
  // xi = Exp(1)/lambda on shared per-vertex draws, so halving lambda doubles
  // every infection clock while recovery clocks stay put.
  const auto law = ChildLaw::parse("0:0.25,2:0.75");
  SimLimits lim;
  lim.depth_limit = 10;  // supercritical clusters are unbounded, compare a window
  for (std::uint64_t i = 0; i < 8000; ++i) {
    const auto hot = run_trial(law, 0.8, lim, trial_key(107, i));
    const auto cold = run_trial(law, 0.4, lim, trial_key(107, i));
    CHECK(cold.progeny <= hot.progeny);
    CHECK(cold.max_depth <= hot.max_depth);
  }
}

TEST_CASE("depth-frequency stays under the union bound") {
  // mean infected at depth n is at most (4 d lambda / (1+lambda)^2)^n
  const auto law = ChildLaw::regular(2);
  const double lam = 0.1;
  const double rate = 4.0 * 2.0 * lam / ((1.0 + lam) * (1.0 + lam));
  for (std::uint32_t depth : {3u, 6u, 9u}) {
    const auto p = estimate_survival(law, lam, depth, 50000, 108, 2);
    CHECK(p.ci_lo <= std::pow(rate, depth));
  }
}

TEST_CASE("determinism: identical seeds give identical outcomes") {
  const auto law = ChildLaw::parse("0:0.25,2:0.75");
  SimLimits lim;
  lim.depth_limit = 14;  // supercritical: bound the excursions
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto a = run_trial(law, 0.6, lim, trial_key(109, i));
    const auto b = run_trial(law, 0.6, lim, trial_key(109, i));
    CHECK(a.progeny == b.progeny);
    CHECK(a.max_depth == b.max_depth);
    CHECK(a.extinct_within_limits == b.extinct_within_limits);
  }
  SUBCASE("worker count does not change estimates") {
    const auto law2 = ChildLaw::regular(2);
    const auto w1 = estimate_survival(law2, 0.5, 30, 5000, 110, 1);
    const auto w4 = estimate_survival(law2, 0.5, 30, 5000, 110, 4);
    CHECK(w1.estimate == w4.estimate);
    CHECK(w1.ci_lo == w4.ci_lo);
    CHECK(w1.ci_hi == w4.ci_hi);
  }
}

TEST_CASE("vertex budget marks progeny as capped") {
  const auto law = ChildLaw::regular(3);
  SimLimits lim;
  lim.vertex_budget = 50;
  std::uint64_t capped = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto out = run_trial(law, 5.0, lim, trial_key(111, i));
    if (out.capped) {
      ++capped;
      CHECK(out.progeny == 50);
    }
  }
  CHECK(capped > 1500);  // lambda = 5 on the ternary tree explodes
  CHECK_THROWS_AS(run_trial(law, -1.0, lim, 1), std::invalid_argument);
}

}  // TEST_SUITE

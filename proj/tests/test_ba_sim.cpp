#include <cmath>
#include <vector>

#include "doctest.h"
#include "treelab/ba_sim.hpp"
#include "treelab/rng.hpp"
#include "treelab/stats.hpp"

using namespace treelab;

TEST_SUITE("ba_sim") {

TEST_CASE("vanishing intensity dies immediately") {
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto out = ba_run_trial(1e-9, 100000, trial_key(300, i));
    CHECK(out.extinct);
    CHECK(out.total_born == 1);
    CHECK(!out.capped);
    REQUIRE(out.extinction_time.has_value());
    CHECK(*out.extinction_time > 0.0);
  }
}

TEST_CASE("root offspring count has mean lambda") {
  double acc = 0.0;
  const std::uint64_t n = 100000;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t root_offspring = 0;
    bool first = true;
    ba_run_trial(0.5, 50, trial_key(301, i), [&](const BaDeathEvent& e) {
      if (first) {
        root_offspring = e.offspring;  // the root dies first
        first = false;
      }
    });
    acc += static_cast<double>(root_offspring);
  }
  CHECK(std::abs(acc / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("event order and birth placement") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    double prev_death = 0.0;
    ba_run_trial(0.6, 2000, trial_key(302, i), [&](const BaDeathEvent& e) {
      CHECK(e.death_time >= prev_death);           // deaths in time order
      CHECK(e.at_risk_time >= e.birth_time);       // at risk only after birth
      CHECK(e.death_time > e.at_risk_time);        // strictly positive clock
      prev_death = e.death_time;
    });
  }
}

TEST_CASE("at-risk durations are unit exponentials") {
  std::vector<double> durations;
  for (std::uint64_t i = 0; i < 4000; ++i)
    ba_run_trial(0.18, 100000, trial_key(303, i), [&](const BaDeathEvent& e) {
      durations.push_back(e.death_time - e.at_risk_time);
    });
  REQUIRE(durations.size() > 4000);
  CHECK(ks_exp1_pvalue(durations) > 0.001);
}

TEST_CASE("subcritical regime is essentially always extinct") {
  const auto p = ba_estimate_extinction(0.2, 1000, 100000, 304, 2);
  CHECK(p.estimate >= 0.99);
  CHECK(p.process == "ba");
}

TEST_CASE("supercritical regime is strictly interior") {
  const auto p = ba_estimate_extinction(0.5, 4000, 20000, 305, 2);
  CHECK(p.estimate > 0.0);
  CHECK(p.estimate < 1.0);
}

TEST_CASE("coupling: survival is monotone in lambda on shared seeds") {
  for (std::uint64_t i = 0; i < 3000; ++i) {
    bool prev_alive = false;
    for (double lam : {0.3, 0.5, 0.8}) {
      const auto out = ba_run_trial(lam, 5000, trial_key(306, i));
      const bool alive = !out.extinct;
      if (prev_alive) CHECK(alive);  // once surviving, stays surviving
      prev_alive = alive;
    }
  }
}

TEST_CASE("a larger cap can only reveal more extinctions") {
  const auto small = ba_estimate_extinction(0.5, 4000, 2000, 307, 2);
  const auto large = ba_estimate_extinction(0.5, 4000, 20000, 307, 2);
  CHECK(small.estimate <= large.estimate);

  SUBCASE("censoring direction is controlled by the flag") {
    const auto lower = ba_estimate_extinction(0.5, 2000, 2000, 308, 2, false);
    const auto upper = ba_estimate_extinction(0.5, 2000, 2000, 308, 2, true);
    CHECK(lower.estimate <= upper.estimate);
  }
}

TEST_CASE("capped trials are flagged, never called extinct") {
  std::uint64_t capped = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto out = ba_run_trial(0.9, 200, trial_key(309, i));
    if (out.capped) {
      ++capped;
      CHECK(!out.extinct);
      CHECK(!out.extinction_time.has_value());
      CHECK(out.total_born >= 200);
    } else {
      CHECK(out.extinct);
    }
  }
  CHECK(capped > 50);
}

}  // TEST_SUITE

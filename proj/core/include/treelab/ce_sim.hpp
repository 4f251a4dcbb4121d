#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "treelab/stats.hpp"
#include "treelab/tree.hpp"

namespace treelab {

struct SimLimits {
  std::uint32_t depth_limit = 1'000'000;
  std::uint64_t vertex_budget = 10'000'000;
  // Forces the root's recovery clock to t (samples the conditional process).
  std::optional<double> root_recovery_override;
  // Stop exploring as soon as some vertex at depth_limit is infected; the
  // progeny count is then partial and flagged as capped.
  bool stop_on_depth_reach = false;
};

struct TrialOutcome {
  std::uint64_t progeny = 1;  // ever-infected vertices, root included
  bool capped = false;
  std::uint32_t max_depth = 0;
  bool extinct_within_limits = true;
};

// One chase-escape trial on the lazily realized tree. Infection clocks are
// Exp(lambda) = Exp(1)/lambda per vertex, recovery clocks Exp(1); a vertex is
// infected iff every prefix of its ancestor line wins the clock race.
TrialOutcome run_trial(const TreeStream& stream, double lambda, const SimLimits& limits);

inline TrialOutcome run_trial(const ChildLaw& law, double lambda, const SimLimits& limits,
                              std::uint64_t trial_seed) {
  return run_trial(TreeStream(law, trial_seed), lambda, limits);
}

// Fraction of trials in which some vertex at depth `depth` is ever infected,
// with a 95% Wilson interval. This upper-bounds the survival probability
// 1 - q and decreases toward it as depth grows.
PhasePoint estimate_survival(const ChildLaw& law, double lambda, std::uint32_t depth,
                             std::uint64_t trials, std::uint64_t base_seed,
                             int workers = 1);

struct ProgenySample {
  std::vector<std::uint64_t> values;  // uncapped Z samples
  std::uint64_t capped_trials = 0;
  std::uint64_t total_trials = 0;
  double capped_fraction() const {
    return total_trials ? static_cast<double>(capped_trials) / static_cast<double>(total_trials)
                        : 0.0;
  }
};

// Independent total-progeny samples; trials that exhaust the vertex budget
// are counted apart so tail estimators can discount them.
ProgenySample sample_progeny(const ChildLaw& law, double lambda, std::uint64_t trials,
                             const SimLimits& limits, std::uint64_t base_seed,
                             int workers = 1);

}  // namespace treelab

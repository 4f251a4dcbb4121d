#include "treelab/ce_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "treelab/rng.hpp"
#include "treelab/runner.hpp"

namespace treelab {

namespace {

struct Frame {
  std::uint64_t key;
  std::uint32_t depth;
  double sum_xi;  // infection clocks along the path, root excluded
  double sum_d;   // recovery clocks of self and all ancestors
};

}  // namespace

TrialOutcome run_trial(const TreeStream& stream, double lambda, const SimLimits& limits) {
  if (!(lambda > 0.0)) throw std::invalid_argument("run_trial requires lambda > 0");
  if (limits.depth_limit < 1 || limits.vertex_budget < 1)
    throw std::invalid_argument("run_trial limits must be >= 1");

  TrialOutcome out;
  const double root_d = limits.root_recovery_override
                            ? *limits.root_recovery_override
                            : unit_exp_draw(stream.root_key(), kStreamRecovery);

  std::vector<Frame> stack;
  stack.push_back({stream.root_key(), 0, 0.0, root_d});
  out.progeny = 1;

  while (!stack.empty()) {
    const Frame v = stack.back();
    stack.pop_back();
    if (v.depth >= limits.depth_limit) continue;  // not expanded past the horizon
    const std::uint32_t n = stream.child_count_by_key(v.key);
    for (std::uint32_t i = 1; i <= n; ++i) {
      const std::uint64_t ck = child_key(v.key, i);
      const double xi = unit_exp_draw(ck, kStreamInfection) / lambda;
      if (!(v.sum_xi + xi < v.sum_d)) continue;  // ties count as non-infection
      if (out.progeny >= limits.vertex_budget) {
        out.capped = true;
        out.extinct_within_limits = false;
        return out;
      }
      ++out.progeny;
      const std::uint32_t cd = v.depth + 1;
      if (cd > out.max_depth) out.max_depth = cd;
      if (cd >= limits.depth_limit) {
        out.extinct_within_limits = false;
        if (limits.stop_on_depth_reach) {
          out.capped = true;  // exploration abandoned, count is partial
          return out;
        }
      }
      stack.push_back({ck, cd, v.sum_xi + xi, v.sum_d + unit_exp_draw(ck, kStreamRecovery)});
    }
  }
  return out;
}

PhasePoint estimate_survival(const ChildLaw& law, double lambda, std::uint32_t depth,
                             std::uint64_t trials, std::uint64_t base_seed, int workers) {
  if (depth < 1 || trials < 1)
    throw std::invalid_argument("estimate_survival requires depth >= 1 and trials >= 1");
  SimLimits limits;
  limits.depth_limit = depth;
  limits.stop_on_depth_reach = true;
  std::vector<char> reached(trials, 0);
  for_each_trial(trials, workers, [&](std::uint64_t i) {
    const auto outcome = run_trial(law, lambda, limits, trial_key(base_seed, i));
    reached[i] = outcome.extinct_within_limits ? 0 : 1;
  });
  std::uint64_t hits = 0;
  for (auto r : reached) hits += r;
  const auto ci = wilson_ci(hits, trials);
  return PhasePoint{"ce",
                    lambda,
                    law.mean(),
                    static_cast<std::int64_t>(depth),
                    trials,
                    static_cast<double>(hits) / static_cast<double>(trials),
                    ci.lo,
                    ci.hi,
                    base_seed};
}

ProgenySample sample_progeny(const ChildLaw& law, double lambda, std::uint64_t trials,
                             const SimLimits& limits, std::uint64_t base_seed, int workers) {
  if (trials < 1) throw std::invalid_argument("sample_progeny requires trials >= 1");
  SimLimits l = limits;
  l.stop_on_depth_reach = false;
  std::vector<std::uint64_t> values(trials, 0);
  std::vector<char> capped(trials, 0);
  for_each_trial(trials, workers, [&](std::uint64_t i) {
    const auto outcome = run_trial(law, lambda, l, trial_key(base_seed, i));
    values[i] = outcome.progeny;
    capped[i] = outcome.capped ? 1 : 0;
  });
  ProgenySample s;
  s.total_trials = trials;
  s.values.reserve(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (capped[i])
      ++s.capped_trials;
    else
      s.values.push_back(values[i]);
  }
  return s;
}

}  // namespace treelab

#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "treelab/stats.hpp"

namespace treelab {

struct BaOutcome {
  bool extinct = false;
  std::uint64_t total_born = 1;
  bool capped = false;
  std::optional<double> extinction_time;
};

// Death-event record for diagnostics: (birth, at-risk, death) of a particle.
struct BaDeathEvent {
  double birth_time;
  double at_risk_time;
  double death_time;
  std::uint64_t offspring;
};
using BaAudit = std::function<void(const BaDeathEvent&)>;

// One birth-and-assassination trial. Particles spawn offspring at Poisson
// rate lambda over their lifetime; a particle's Exp(1) death clock starts at
// its genitor's death. Offspring are materialized at the parent's death
// event, when their at-risk times are known. Counter-based keys make the
// realization a pure function of (trial_seed, particle path), so a larger
// lambda yields a superset of particles on shared seeds.
BaOutcome ba_run_trial(double lambda, std::uint64_t particle_cap, std::uint64_t trial_seed,
                       const BaAudit& audit = {});

// Extinct fraction over independent trials with a Wilson interval. Trials
// that hit the particle cap count as non-extinct, so the estimate is a lower
// bound on the extinction probability; pass censored_as_extinct = true for
// the complementary upper bracket.
PhasePoint ba_estimate_extinction(double lambda, std::uint64_t trials, std::uint64_t cap,
                                  std::uint64_t base_seed, int workers = 1,
                                  bool censored_as_extinct = false);

}  // namespace treelab

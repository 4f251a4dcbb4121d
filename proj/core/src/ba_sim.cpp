#include "treelab/ba_sim.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "treelab/rng.hpp"
#include "treelab/runner.hpp"

namespace treelab {

namespace {

struct Particle {
  double death_time;
  double birth_time;
  double at_risk_time;
  std::uint64_t key;
};

struct LaterDeath {
  bool operator()(const Particle& a, const Particle& b) const {
    return a.death_time > b.death_time;
  }
};

}  // namespace

BaOutcome ba_run_trial(double lambda, std::uint64_t particle_cap, std::uint64_t trial_seed,
                       const BaAudit& audit) {
  if (!(lambda > 0.0)) throw std::invalid_argument("ba_run_trial requires lambda > 0");
  if (particle_cap < 1) throw std::invalid_argument("ba_run_trial requires particle_cap >= 1");

  BaOutcome out;
  std::priority_queue<Particle, std::vector<Particle>, LaterDeath> queue;
  const std::uint64_t root_key = trial_key(trial_seed, 0);
  queue.push({unit_exp_draw(root_key, kStreamRecovery), 0.0, 0.0, root_key});
  out.total_born = 1;

  double last_death = 0.0;
  while (!queue.empty()) {
    const Particle p = queue.top();
    queue.pop();
    last_death = p.death_time;

    const double lifetime = p.death_time - p.birth_time;
    CounterRng count_stream(p.key, kStreamBirthCount);
    const std::uint64_t n = count_stream.next_poisson(lambda * lifetime);
    if (audit) audit({p.birth_time, p.at_risk_time, p.death_time, n});
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (out.total_born >= particle_cap) {
        out.capped = true;
        out.extinct = false;
        return out;
      }
      ++out.total_born;
      const std::uint64_t ck = child_key(p.key, i);
      const double birth = p.birth_time + unit_draw(ck, kStreamBirthPlace) * lifetime;
      const double death = p.death_time + unit_exp_draw(ck, kStreamRecovery);
      queue.push({death, birth, p.death_time, ck});
    }
  }
  out.extinct = true;
  out.extinction_time = last_death;
  return out;
}

PhasePoint ba_estimate_extinction(double lambda, std::uint64_t trials, std::uint64_t cap,
                                  std::uint64_t base_seed, int workers,
                                  bool censored_as_extinct) {
  if (trials < 1) throw std::invalid_argument("ba_estimate_extinction requires trials >= 1");
  std::vector<char> extinct(trials, 0);
  for_each_trial(trials, workers, [&](std::uint64_t i) {
    const auto outcome = ba_run_trial(lambda, cap, trial_key(base_seed, i));
    extinct[i] = (outcome.extinct || (outcome.capped && censored_as_extinct)) ? 1 : 0;
  });
  std::uint64_t hits = 0;
  for (auto e : extinct) hits += e;
  const auto ci = wilson_ci(hits, trials);
  return PhasePoint{"ba",
                    lambda,
                    std::numeric_limits<double>::quiet_NaN(),
                    static_cast<std::int64_t>(cap),
                    trials,
                    static_cast<double>(hits) / static_cast<double>(trials),
                    ci.lo,
                    ci.hi,
                    base_seed};
}

}  // namespace treelab

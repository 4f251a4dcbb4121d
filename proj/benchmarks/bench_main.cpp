#include <benchmark/benchmark.h>

#include <sstream>

#include "treelab/ba_sim.hpp"
#include "treelab/ce_sim.hpp"
#include "treelab/ctmc.hpp"
#include "treelab/rng.hpp"
#include "treelab/solver.hpp"
#include "treelab/tail_stats.hpp"
#include "treelab/tree.hpp"

using namespace treelab;

static void CeTrialSubcritical(benchmark::State& state) {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(law, 0.15, lim, trial_key(1, i++)));
  }
}
BENCHMARK(CeTrialSubcritical);

static void CeTrialSupercriticalDepth60(benchmark::State& state) {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  lim.depth_limit = 60;
  lim.stop_on_depth_reach = true;
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(law, 0.9, lim, trial_key(2, i++)));
  }
}
BENCHMARK(CeTrialSupercriticalDepth60);

static void BaTrial(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ba_run_trial(0.5, 10000, trial_key(3, i++)));
  }
}
BENCHMARK(BaTrial);

static void GillespieDepth2Binary(benchmark::State& state) {
  const TreeStream stream(ChildLaw::regular(2), 0);
  const auto graph = CtmcGraph::from_tree(truncate(stream, 2));
  const auto init = initial_state(graph);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gillespie_run(graph, init, 0.5, trial_key(4, i++)));
  }
}
BENCHMARK(GillespieDepth2Binary);

static void BaShootingSolve(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(ba_fixed_point(0.5));
  }
}
BENCHMARK(BaShootingSolve)->Unit(benchmark::kMillisecond);

static void CeOperatorSolve(benchmark::State& state) {
  const auto d2 = OffspringDistribution::point_mass(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ce_operator_iterate(0.6, d2));
  }
}
BENCHMARK(CeOperatorSolve)->Unit(benchmark::kMillisecond);

static void HillOnProgeny(benchmark::State& state) {
  SimLimits lim;
  const auto s = sample_progeny(ChildLaw::regular(2), 0.15, 200000, lim, 5, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hill_exponent(std::span<const std::uint64_t>(s.values), 400, 0.0));
  }
}
BENCHMARK(HillOnProgeny);

static void TruncateGwDepth16(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    const TreeStream stream(ChildLaw::parse("0:0.25,2:0.75"), trial_key(6, i++));
    try {
      benchmark::DoNotOptimize(truncate(stream, 16, 2'000'000));
    } catch (const BudgetExceeded&) {
    }
  }
}
BENCHMARK(TruncateGwDepth16);

BENCHMARK_MAIN();

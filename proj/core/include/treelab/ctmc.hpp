#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "treelab/tree.hpp"

namespace treelab {

enum class Health : std::uint8_t { susceptible, infected, recovered };

enum class AbsorbReason : std::uint8_t {
  no_infected,          // every infected vertex eventually recovered
  no_active_transition  // infected vertices remain but no rate is positive
};

// Small undirected graph with a designated recovered seed `o` and an
// infected seed `root`. Hard-capped at 1e4 vertices: this code favors
// transparency over speed.
struct CtmcGraph {
  std::vector<std::vector<std::int32_t>> adj;
  std::int32_t o = -1;
  std::int32_t root = -1;
  std::vector<std::string> names;

  // Edge-list text: one `u v` pair per line; vertex names are free-form
  // strings and must include `o` and `root`.
  static CtmcGraph parse(std::istream& in);
  // The tree plus the extra vertex `o` attached to its root.
  static CtmcGraph from_tree(const FiniteTree& tree);
};

// root infected, o recovered, everything else susceptible.
std::vector<Health> initial_state(const CtmcGraph& g);

struct OracleResult {
  std::vector<Health> final_state;
  std::uint64_t progeny = 0;  // recovered vertices at absorption, o excluded
  double elapsed = 0.0;
  std::uint64_t steps = 0;
  AbsorbReason reason = AbsorbReason::no_infected;
};

// Exact continuous-time simulation from the transition rates: a susceptible
// vertex is infected at rate lambda per infected neighbor, an infected
// vertex recovers at rate 1 per recovered neighbor. Runs to absorption.
// With audit = true every step cross-checks the total exit rate against an
// independent edge recount.
OracleResult gillespie_run(const CtmcGraph& g, std::vector<Health> init, double lambda,
                           std::uint64_t seed, bool audit = false);

}  // namespace treelab

#include "treelab/ctmc.hpp"

#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "treelab/rng.hpp"

namespace treelab {

namespace {

constexpr std::size_t kVertexCap = 10'000;

void check_cap(std::size_t n) {
  if (n > kVertexCap)
    throw std::invalid_argument("ctmc graph exceeds the 1e4 vertex cap");
}

}  // namespace

CtmcGraph CtmcGraph::parse(std::istream& in) {
  CtmcGraph g;
  std::map<std::string, std::int32_t> ids;
  auto intern = [&](const std::string& name) {
    auto [it, fresh] = ids.emplace(name, static_cast<std::int32_t>(g.names.size()));
    if (fresh) {
      g.names.push_back(name);
      g.adj.emplace_back();
      check_cap(g.names.size());
    }
    return it->second;
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string u, v;
    if (!(ls >> u >> v)) throw std::invalid_argument("edge line needs two vertices: '" + line + "'");
    const auto iu = intern(u), iv = intern(v);
    if (iu == iv) throw std::invalid_argument("self-loop at '" + u + "'");
    g.adj[static_cast<std::size_t>(iu)].push_back(iv);
    g.adj[static_cast<std::size_t>(iv)].push_back(iu);
  }
  auto o_it = ids.find("o");
  auto root_it = ids.find("root");
  if (o_it == ids.end() || root_it == ids.end())
    throw std::invalid_argument("edge list must name vertices 'o' and 'root'");
  g.o = o_it->second;
  g.root = root_it->second;
  return g;
}

CtmcGraph CtmcGraph::from_tree(const FiniteTree& tree) {
  if (tree.is_empty()) throw std::invalid_argument("cannot build a graph from an empty tree");
  check_cap(tree.size() + 1);
  CtmcGraph g;
  const std::size_t n = tree.size();
  g.adj.resize(n + 1);
  g.names.reserve(n + 1);
  for (std::size_t v = 0; v < n; ++v) {
    g.names.push_back(v == 0 ? "root" : tree.path_of(v).to_string());
    if (tree.parent(v) >= 0) {
      g.adj[v].push_back(tree.parent(v));
      g.adj[static_cast<std::size_t>(tree.parent(v))].push_back(static_cast<std::int32_t>(v));
    }
  }
  g.names.push_back("o");
  g.o = static_cast<std::int32_t>(n);
  g.root = 0;
  g.adj[static_cast<std::size_t>(g.o)].push_back(0);
  g.adj[0].push_back(g.o);
  return g;
}

std::vector<Health> initial_state(const CtmcGraph& g) {
  std::vector<Health> state(g.adj.size(), Health::susceptible);
  if (g.o < 0 || g.root < 0) throw std::invalid_argument("graph lacks o/root designation");
  state[static_cast<std::size_t>(g.o)] = Health::recovered;
  state[static_cast<std::size_t>(g.root)] = Health::infected;
  return state;
}

OracleResult gillespie_run(const CtmcGraph& g, std::vector<Health> state, double lambda,
                           std::uint64_t seed, bool audit) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gillespie_run requires lambda > 0");
  if (state.size() != g.adj.size()) throw std::invalid_argument("state/graph size mismatch");
  check_cap(state.size());

  OracleResult res;
  CounterRng rng(seed, kStreamChildCount);

  struct Transition {
    std::int32_t vertex;
    std::uint32_t multiplicity;  // active neighbors driving the flip
    bool to_infected;
  };
  std::vector<Transition> transitions;

  for (;;) {
    transitions.clear();
    std::uint64_t weight_si = 0;  // susceptible-infected adjacency, with multiplicity
    std::uint64_t weight_ir = 0;  // infected-recovered adjacency
    bool any_infected = false;
    for (std::size_t v = 0; v < state.size(); ++v) {
      if (state[v] == Health::infected) any_infected = true;
      std::uint32_t m = 0;
      if (state[v] == Health::susceptible) {
        for (auto u : g.adj[v]) m += (state[static_cast<std::size_t>(u)] == Health::infected);
        if (m) {
          transitions.push_back({static_cast<std::int32_t>(v), m, true});
          weight_si += m;
        }
      } else if (state[v] == Health::infected) {
        for (auto u : g.adj[v]) m += (state[static_cast<std::size_t>(u)] == Health::recovered);
        if (m) {
          transitions.push_back({static_cast<std::int32_t>(v), m, false});
          weight_ir += m;
        }
      }
    }

    if (audit) {
      // Independent recount straight over edges.
      std::uint64_t si = 0, ir = 0;
      for (std::size_t v = 0; v < state.size(); ++v)
        for (auto u : g.adj[v]) {
          const auto su = state[static_cast<std::size_t>(u)];
          if (state[v] == Health::susceptible && su == Health::infected) ++si;
          if (state[v] == Health::infected && su == Health::recovered) ++ir;
        }
      if (si != weight_si || ir != weight_ir)
        throw std::logic_error("gillespie rate bookkeeping mismatch");
    }

    const double total_rate =
        lambda * static_cast<double>(weight_si) + static_cast<double>(weight_ir);
    if (transitions.empty() || total_rate <= 0.0) {
      res.reason = any_infected ? AbsorbReason::no_active_transition : AbsorbReason::no_infected;
      break;
    }

    res.elapsed += rng.next_exp(total_rate);
    ++res.steps;
    double pick = rng.next_unit() * total_rate;
    std::size_t chosen = transitions.size() - 1;
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      const double r = transitions[i].to_infected
                           ? lambda * static_cast<double>(transitions[i].multiplicity)
                           : static_cast<double>(transitions[i].multiplicity);
      if (pick < r) {
        chosen = i;
        break;
      }
      pick -= r;
    }
    const auto& t = transitions[chosen];
    state[static_cast<std::size_t>(t.vertex)] =
        t.to_infected ? Health::infected : Health::recovered;
  }

  for (std::size_t v = 0; v < state.size(); ++v)
    if (state[v] == Health::recovered && static_cast<std::int32_t>(v) != g.o) ++res.progeny;
  res.final_state = std::move(state);
  return res;
}

}  // namespace treelab

// treelab: chase-escape and birth-and-assassination laboratory.
//
// Subcommands: formulas, ce-sim, ba-sim, solve-ce, solve-ba, profile, phase,
// tail, verify. All randomness derives from --seed; results are identical
// for any worker count.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "treelab/ba_sim.hpp"
#include "treelab/ce_sim.hpp"
#include "treelab/ctmc.hpp"
#include "treelab/formulas.hpp"
#include "treelab/io.hpp"
#include "treelab/rng.hpp"
#include "treelab/runner.hpp"
#include "treelab/solver.hpp"
#include "treelab/stats.hpp"
#include "treelab/tail_stats.hpp"
#include "treelab/tree.hpp"
#include "treelab/verify.hpp"

namespace {

using nlohmann::json;
using namespace treelab;

struct OutputTarget {
  std::string path;  // empty = stdout
  std::ostream& open() {
    if (path.empty()) return std::cout;
    file = std::make_unique<std::ofstream>(path);
    if (!*file) throw CLI::ValidationError("--out", "cannot open '" + path + "'");
    return *file;
  }
  std::unique_ptr<std::ofstream> file;
};

json solution_to_json(const OdeSolution& sol, double lambda) {
  json out;
  out["lambda"] = lambda;
  out["q"] = sol.q;
  out["q_lo"] = sol.q_lo;
  out["q_hi"] = sol.q_hi;
  out["survival"] = sol.survival;
  out["xprime0"] = sol.xprime0;
  out["rho"] = sol.rho;
  out["method"] = sol.method == SolveMethod::shooting ? "shooting" : "operator_iteration";
  out["tracked_until"] = sol.tracked_until;
  out["iterations"] = sol.iterations;
  if (!sol.note.empty()) out["note"] = sol.note;
  // grid downsampled to at most 500 points
  const std::size_t stride = std::max<std::size_t>(1, sol.t.size() / 500);
  json grid = json::array();
  for (std::size_t i = 0; i < sol.t.size(); i += stride)
    grid.push_back({{"t", sol.t[i]}, {"x", sol.x[i]}, {"xp", sol.xp[i]}});
  out["grid"] = grid;
  return out;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--t-max", cfg.t_max, "solution horizon")->capture_default_str();
  cmd->add_option("--step", cfg.step, "integrator step")->capture_default_str();
  cmd->add_option("--bisection-tol", cfg.bisection_tol, "tolerance on x'(0)")
      ->capture_default_str();
  cmd->add_option("--operator-iters", cfg.operator_iters, "operator iteration budget")
      ->capture_default_str();
  cmd->add_option("--operator-tol", cfg.operator_tol, "sup-norm increment tolerance")
      ->capture_default_str();
  cmd->add_option("--gray-zone", cfg.gray_zone, "phase-portrait crossing margin near x=1")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chase-escape / birth-and-assassination laboratory"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags like --workers may follow the subcommand
  app.set_config("--config", "", "key=value config file; flags override");

  int workers = default_worker_count();
  app.add_option("--workers", workers, "worker thread count")
      ->envname("TREELAB_WORKERS")
      ->capture_default_str();

  // ---- formulas ----------------------------------------------------------
  auto* formulas = app.add_subcommand("formulas", "evaluate one closed form as JSON");
  std::string name;
  double f_lambda = 0.1, f_d = 2.0, f_u = 2.0, f_t = 1.0, f_x = 1.0, f_delta = 2.0;
  double f_omega = 0.1, f_gamma_p = std::numeric_limits<double>::infinity();
  double f_c0 = 1.0, f_c1 = 1.0;
  formulas
      ->add_option("--name", name,
                   "one of: lambda1, lambda2, spectral, mean-progeny, mean-profile, "
                   "gamma-bar, gamma, lambda-u, rate-j, g-delta, g-delta-min, "
                   "ba-envelope, ce-envelope, critical-scale")
      ->required();
  formulas->add_option("--lambda", f_lambda, "infection intensity");
  formulas->add_option("--d", f_d, "mean offspring");
  formulas->add_option("--u", f_u, "moment order");
  formulas->add_option("--t", f_t, "time argument");
  formulas->add_option("--x", f_x, "evaluation point");
  formulas->add_option("--delta", f_delta, "offspring margin delta");
  formulas->add_option("--omega", f_omega, "distance sqrt(lambda - 1/4)");
  formulas->add_option("--gamma-p", f_gamma_p, "offspring tail exponent");
  formulas->add_option("--c0", f_c0, "upper envelope constant");
  formulas->add_option("--c1", f_c1, "lower envelope constant");
  formulas->callback([&] {
    json out;
    out["name"] = name;
    if (name == "lambda1") {
      out["d"] = f_d;
      out["value"] = lambda1(f_d);
    } else if (name == "lambda2") {
      out["d"] = f_d;
      out["value"] = lambda2(f_d);
    } else if (name == "spectral") {
      const auto sp = spectral(f_lambda, f_d);
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["delta"] = sp.delta;
      out["alpha"] = sp.alpha;
      out["beta"] = sp.beta;
    } else if (name == "mean-progeny") {
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["value"] = mean_progeny(f_lambda, f_d);
    } else if (name == "mean-profile") {
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["t"] = f_t;
      out["value"] = mean_profile(f_lambda, f_d, f_t);
    } else if (name == "gamma-bar") {
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["value"] = gamma_bar(f_lambda, f_d);
    } else if (name == "gamma") {
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["gamma_p"] = f_gamma_p;
      out["value"] = gamma_of_lambda(f_lambda, f_d, f_gamma_p);
    } else if (name == "lambda-u") {
      out["u"] = f_u;
      out["d"] = f_d;
      out["value"] = lambda_u(f_u, f_d);
    } else if (name == "rate-j") {
      out["x"] = f_x;
      out["value"] = rate_j(f_x);
    } else if (name == "g-delta") {
      out["x"] = f_x;
      out["lambda"] = f_lambda;
      out["delta"] = f_delta;
      out["value"] = g_delta(f_x, f_lambda, f_delta);
    } else if (name == "g-delta-min") {
      const auto m = g_delta_min(f_lambda, f_delta);
      out["lambda"] = f_lambda;
      out["delta"] = f_delta;
      out["argmin"] = m.argmin;
      out["value"] = m.value;
    } else if (name == "ba-envelope") {
      const auto env = ba_xprime_envelope(f_omega);
      out["omega"] = f_omega;
      out["lower"] = env.lower;
      out["upper"] = env.upper;
    } else if (name == "ce-envelope") {
      const auto env = ce_xprime_envelope(f_lambda, f_d, f_c0, f_c1);
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["lower"] = env.lower;
      out["upper"] = env.upper;
    } else if (name == "critical-scale") {
      out["lambda"] = f_lambda;
      out["d"] = f_d;
      out["value"] = ce_critical_scale(f_lambda, f_d);
    } else {
      throw CLI::ValidationError("--name", "unknown formula '" + name + "'");
    }
    std::cout << out.dump() << "\n";
  });

  // ---- ce-sim --------------------------------------------------------------
  auto* ce = app.add_subcommand("ce-sim", "chase-escape Monte Carlo on a tree stream");
  std::string ce_pmf = "dary:2", ce_emit = "survival", ce_format = "csv";
  double ce_lambda = 0.5;
  std::uint64_t ce_trials = 10000, ce_seed = 1, ce_budget = 10'000'000;
  std::uint32_t ce_depth = 60;
  std::optional<double> ce_override;
  OutputTarget ce_out;
  ce->add_option("--pmf", ce_pmf, "offspring law: k:p pairs or dary:<k>")
      ->capture_default_str();
  ce->add_option("--lambda", ce_lambda, "infection intensity")->required();
  ce->add_option("--trials", ce_trials)->capture_default_str();
  ce->add_option("--depth", ce_depth, "depth horizon")->capture_default_str();
  ce->add_option("--vertex-budget", ce_budget)->capture_default_str();
  ce->add_option("--root-recovery", ce_override, "force the root recovery time");
  ce->add_option("--seed", ce_seed)->capture_default_str();
  ce->add_option("--emit", ce_emit, "survival | trials | progeny")->capture_default_str();
  ce->add_option("--format", ce_format, "csv | jsonl")->capture_default_str();
  ce->add_option("--out", ce_out.path, "output file (default stdout)");
  ce->callback([&] {
    const auto law = ChildLaw::parse(ce_pmf);
    auto& os = ce_out.open();
    if (ce_emit == "survival") {
      const auto p = estimate_survival(law, ce_lambda, ce_depth, ce_trials, ce_seed, workers);
      write_phase_table(os, {p}, parse_output_format(ce_format));
    } else if (ce_emit == "trials") {
      SimLimits lim;
      lim.depth_limit = ce_depth;
      lim.vertex_budget = ce_budget;
      lim.root_recovery_override = ce_override;
      std::vector<TrialOutcome> outs(ce_trials);
      for_each_trial(ce_trials, workers, [&](std::uint64_t i) {
        outs[i] = run_trial(law, ce_lambda, lim, trial_key(ce_seed, i));
      });
      for (std::uint64_t i = 0; i < ce_trials; ++i) os << trial_json_row(outs[i], i) << "\n";
    } else if (ce_emit == "progeny") {
      SimLimits lim;
      lim.depth_limit = ce_depth;
      lim.vertex_budget = ce_budget;
      lim.root_recovery_override = ce_override;
      const auto s = sample_progeny(law, ce_lambda, ce_trials, lim, ce_seed, workers);
      for (auto v : s.values) os << v << "\n";
      std::cerr << "capped trials: " << s.capped_trials << " of " << s.total_trials << "\n";
    } else {
      throw CLI::ValidationError("--emit", "expected survival, trials or progeny");
    }
  });

  // ---- ba-sim --------------------------------------------------------------
  auto* ba = app.add_subcommand("ba-sim", "birth-and-assassination Monte Carlo");
  double ba_lambda = 0.5;
  std::uint64_t ba_trials = 10000, ba_seed = 1, ba_cap = 100000;
  bool ba_censored_extinct = false;
  std::string ba_emit = "extinction", ba_format = "csv";
  OutputTarget ba_out;
  ba->add_option("--lambda", ba_lambda)->required();
  ba->add_option("--trials", ba_trials)->capture_default_str();
  ba->add_option("--cap", ba_cap, "particle budget per trial")->capture_default_str();
  ba->add_option("--seed", ba_seed)->capture_default_str();
  ba->add_flag("--censored-as-extinct", ba_censored_extinct,
               "count capped trials as extinct (upper bracket)");
  ba->add_option("--emit", ba_emit, "extinction | trials")->capture_default_str();
  ba->add_option("--format", ba_format, "csv | jsonl")->capture_default_str();
  ba->add_option("--out", ba_out.path);
  ba->callback([&] {
    auto& os = ba_out.open();
    if (ba_emit == "extinction") {
      const auto p = ba_estimate_extinction(ba_lambda, ba_trials, ba_cap, ba_seed, workers,
                                            ba_censored_extinct);
      write_phase_table(os, {p}, parse_output_format(ba_format));
    } else if (ba_emit == "trials") {
      std::vector<BaOutcome> outs(ba_trials);
      for_each_trial(ba_trials, workers, [&](std::uint64_t i) {
        outs[i] = ba_run_trial(ba_lambda, ba_cap, trial_key(ba_seed, i));
      });
      for (std::uint64_t i = 0; i < ba_trials; ++i) os << ba_trial_json_row(outs[i], i) << "\n";
    } else {
      throw CLI::ValidationError("--emit", "expected extinction or trials");
    }
  });

  // ---- solve-ba / solve-ce / profile ---------------------------------------
  auto* sba = app.add_subcommand("solve-ba", "analytic BA survival solve");
  double sba_lambda = 0.5;
  SolverConfig sba_cfg;
  std::string sba_method = "shooting";
  sba->add_option("--lambda", sba_lambda)->required();
  sba->add_option("--method", sba_method, "shooting | operator")->capture_default_str();
  add_solver_flags(sba, sba_cfg);
  sba->callback([&] {
    const auto sol = sba_method == "operator" ? ba_operator_iterate(sba_lambda, sba_cfg)
                                              : ba_fixed_point(sba_lambda, sba_cfg);
    std::cout << solution_to_json(sol, sba_lambda).dump() << "\n";
  });

  auto* sce = app.add_subcommand("solve-ce", "analytic chase-escape survival solve");
  double sce_lambda = 0.5;
  std::string sce_pmf = "dary:2", sce_method = "shooting";
  SolverConfig sce_cfg;
  sce->add_option("--lambda", sce_lambda)->required();
  sce->add_option("--pmf", sce_pmf)->capture_default_str();
  sce->add_option("--method", sce_method, "shooting | operator")->capture_default_str();
  add_solver_flags(sce, sce_cfg);
  sce->callback([&] {
    const auto dist = ChildLaw::parse(sce_pmf).as_distribution();
    const auto sol = sce_method == "operator" ? ce_operator_iterate(sce_lambda, dist, sce_cfg)
                                              : ce_fixed_point(sce_lambda, dist, sce_cfg);
    std::cout << solution_to_json(sol, sce_lambda).dump() << "\n";
  });

  auto* prof = app.add_subcommand("profile", "first-moment profile iteration");
  double prof_lambda = 0.1, prof_d = 2.0;
  SolverConfig prof_cfg;
  prof->add_option("--lambda", prof_lambda)->required();
  prof->add_option("--d", prof_d)->capture_default_str();
  add_solver_flags(prof, prof_cfg);
  prof->callback([&] {
    const auto it = mean_profile_iteration(prof_lambda, prof_d, prof_cfg);
    json out;
    out["lambda"] = prof_lambda;
    out["d"] = prof_d;
    out["iterations"] = it.iterations;
    const std::size_t stride = std::max<std::size_t>(1, it.t.size() / 500);
    json grid = json::array();
    for (std::size_t i = 0; i < it.t.size(); i += stride)
      grid.push_back({{"t", it.t[i]}, {"g", it.g[i]}});
    out["grid"] = grid;
    std::cout << out.dump() << "\n";
  });

  // ---- phase ----------------------------------------------------------------
  auto* phase = app.add_subcommand("phase", "survival/extinction sweep over lambda");
  std::string ph_process = "ce", ph_pmf = "dary:2", ph_format = "csv";
  double ph_start = 0.1, ph_stop = 0.9;
  std::uint32_t ph_count = 9, ph_depth = 60;
  std::uint64_t ph_trials = 10000, ph_seed = 1, ph_cap = 100000;
  OutputTarget ph_out;
  phase->add_option("--process", ph_process, "ce | ba")->capture_default_str();
  phase->add_option("--pmf", ph_pmf)->capture_default_str();
  phase->add_option("--lambda-start", ph_start)->required();
  phase->add_option("--lambda-stop", ph_stop)->required();
  phase->add_option("--lambda-count", ph_count)->capture_default_str();
  phase->add_option("--depth", ph_depth)->capture_default_str();
  phase->add_option("--trials", ph_trials)->capture_default_str();
  phase->add_option("--cap", ph_cap, "BA particle budget")->capture_default_str();
  phase->add_option("--seed", ph_seed)->capture_default_str();
  phase->add_option("--format", ph_format)->capture_default_str();
  phase->add_option("--out", ph_out.path);
  phase->callback([&] {
    if (ph_count < 1) throw CLI::ValidationError("--lambda-count", "needs count >= 1");
    std::vector<PhasePoint> rows;
    for (std::uint32_t i = 0; i < ph_count; ++i) {
      const double lam =
          ph_count == 1 ? ph_start
                        : ph_start + (ph_stop - ph_start) * i / (ph_count - 1.0);
      if (ph_process == "ce")
        rows.push_back(estimate_survival(ChildLaw::parse(ph_pmf), lam, ph_depth, ph_trials,
                                         ph_seed, workers));
      else if (ph_process == "ba")
        rows.push_back(ba_estimate_extinction(lam, ph_trials, ph_cap, ph_seed, workers));
      else
        throw CLI::ValidationError("--process", "expected ce or ba");
    }
    write_phase_table(ph_out.open(), rows, parse_output_format(ph_format));
  });

  // ---- tree -----------------------------------------------------------------
  auto* tree_cmd = app.add_subcommand("tree", "materialize and dump a tree stream");
  std::string tr_pmf = "dary:2";
  std::uint64_t tr_seed = 1, tr_budget = 10'000'000;
  std::uint32_t tr_depth = 4, tr_prune_threshold = 0, tr_prune_rounds = 0;
  OutputTarget tr_out;
  tree_cmd->add_option("--pmf", tr_pmf)->capture_default_str();
  tree_cmd->add_option("--seed", tr_seed)->capture_default_str();
  tree_cmd->add_option("--depth", tr_depth)->capture_default_str();
  tree_cmd->add_option("--vertex-budget", tr_budget)->capture_default_str();
  tree_cmd->add_option("--prune-threshold", tr_prune_threshold,
                       "surviving-child threshold (0 = no pruning)");
  tree_cmd->add_option("--prune-rounds", tr_prune_rounds);
  tree_cmd->add_option("--out", tr_out.path);
  tree_cmd->callback([&] {
    const TreeStream stream(ChildLaw::parse(tr_pmf), tr_seed);
    auto tree = truncate(stream, tr_depth, tr_budget);
    if (tr_prune_threshold > 0)
      tree = iterative_prune(tree, tr_prune_threshold, tr_prune_rounds);
    tree.serialize(tr_out.open());
  });

  // ---- oracle ---------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "exact CTMC simulation on an edge-list graph");
  std::string or_graph;
  double or_lambda = 0.5;
  std::uint64_t or_trials = 1000, or_seed = 1;
  bool or_audit = false;
  std::string or_emit = "summary";
  OutputTarget or_out;
  oracle->add_option("--graph", or_graph, "edge list, one 'u v' per line; must name o and root")
      ->required();
  oracle->add_option("--lambda", or_lambda)->required();
  oracle->add_option("--trials", or_trials)->capture_default_str();
  oracle->add_option("--seed", or_seed)->capture_default_str();
  oracle->add_flag("--audit", or_audit, "recount transition rates at every step");
  oracle->add_option("--emit", or_emit, "summary | trials")->capture_default_str();
  oracle->add_option("--out", or_out.path);
  oracle->callback([&] {
    std::ifstream in(or_graph);
    if (!in) throw CLI::ValidationError("--graph", "cannot open '" + or_graph + "'");
    const auto graph = CtmcGraph::parse(in);
    const auto init = initial_state(graph);
    auto& os = or_out.open();
    std::vector<OracleResult> outs(or_trials);
    for_each_trial(or_trials, workers, [&](std::uint64_t i) {
      outs[i] = gillespie_run(graph, init, or_lambda, trial_key(or_seed, i), or_audit);
    });
    if (or_emit == "trials") {
      for (std::uint64_t i = 0; i < or_trials; ++i) {
        json row;
        row["trial"] = i;
        row["progeny"] = outs[i].progeny;
        row["elapsed"] = outs[i].elapsed;
        row["steps"] = outs[i].steps;
        row["reason"] = outs[i].reason == AbsorbReason::no_infected ? "no_infected"
                                                                    : "no_active_transition";
        os << row.dump() << "\n";
      }
    } else if (or_emit == "summary") {
      double mean_z = 0.0, mean_elapsed = 0.0;
      for (const auto& r : outs) {
        mean_z += static_cast<double>(r.progeny);
        mean_elapsed += r.elapsed;
      }
      json out;
      out["lambda"] = or_lambda;
      out["trials"] = or_trials;
      out["mean_progeny"] = mean_z / static_cast<double>(or_trials);
      out["mean_elapsed"] = mean_elapsed / static_cast<double>(or_trials);
      out["seed"] = or_seed;
      os << out.dump() << "\n";
    } else {
      throw CLI::ValidationError("--emit", "expected summary or trials");
    }
  });

  // ---- tail -----------------------------------------------------------------
  auto* tail = app.add_subcommand("tail", "Hill tail-exponent estimate from samples");
  std::string tail_input;
  int tail_k = 0;
  std::uint64_t tail_capped = 0;
  tail->add_option("--input", tail_input, "one integer per line")->required();
  tail->add_option("--k", tail_k, "Hill window (default n^(2/3))");
  tail->add_option("--capped", tail_capped, "count of capped samples excluded upstream");
  tail->callback([&] {
    std::ifstream in(tail_input);
    if (!in) throw CLI::ValidationError("--input", "cannot open '" + tail_input + "'");
    const auto samples = read_sample_file(in);
    const int k = tail_k > 0 ? tail_k : default_hill_k(samples.size());
    const double frac =
        samples.empty() ? 0.0
                        : static_cast<double>(tail_capped) /
                              static_cast<double>(samples.size() + tail_capped);
    const auto est = hill_exponent(std::span<const std::uint64_t>(samples), k, frac);
    json out;
    out["exponent"] = est.exponent;
    out["k_used"] = est.k_used;
    out["stderr"] = est.stderr_;
    out["capped_fraction"] = est.capped_fraction;
    out["samples"] = samples.size();
    std::cout << out.dump() << "\n";
  });

  // ---- verify ---------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run the acceptance check suite");
  VerifyOptions vopts;
  bool list_only = false;
  verify->add_option("--filter", vopts.filter, "run only checks whose name contains this");
  verify->add_option("--seed", vopts.base_seed)->capture_default_str();
  verify->add_flag("--list", list_only, "list check names and exit");
  verify->add_flag("--inject-wrong-gamma", vopts.inject_wrong_gamma)->group("");  // hidden
  verify->callback([&] {
    if (list_only) {
      for (const auto& n : list_checks()) std::cout << n << "\n";
      return;
    }
    vopts.workers = workers;
    const auto results = run_checks(vopts, &std::cout);
    int fails = 0;
    for (const auto& r : results) fails += !r.pass;
    std::cout << results.size() - fails << "/" << results.size() << " checks passed\n";
    if (fails) throw CLI::RuntimeError(1);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "treelab/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

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

namespace treelab {

namespace {

struct Ctx {
  VerifyOptions opts;
  int workers = 1;
  std::ostringstream detail;

  bool ok = true;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

using CheckFn = std::function<void(Ctx&)>;

struct Check {
  std::string name;
  CheckFn fn;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// --- 1. closed forms ------------------------------------------------------

void check_closed_forms(Ctx& c) {
  c.expect(std::abs(lambda1(2.0) - (3.0 - 2.0 * std::sqrt(2.0))) < 1e-12, "lambda1(2)");
  c.expect(std::abs(lambda1(4.0) - (7.0 - 4.0 * std::sqrt(3.0))) < 1e-12, "lambda1(4)");
  c.expect(std::abs(1e4 * lambda1(1e4) - 0.25) < 1e-4, "d*lambda1 -> 1/4");
  for (double d : {2.0, 3.0, 5.0})
    c.expect(std::abs(lambda_u(1.0, d) - lambda1(d)) < 1e-12, "lambda_u(1)=lambda1");
  for (double u : {1.5, 2.0, 3.0})
    for (double d : {2.0, 3.0, 5.0})
      c.expect(std::abs(gamma_bar(lambda_u(u, d), d) - u) < 1e-9, "gamma_bar round trip");
  const double l1 = lambda1(2.0);
  c.expect(g_delta_min(l1 - 1e-6, 2.0).value > 0.0, "min g_d sign below lambda1");
  c.expect(g_delta_min(l1 + 1e-6, 2.0).value < 0.0, "min g_d sign above lambda1");
  c.expect(std::abs(mean_progeny(1e-12, 2.0) - 1.0) < 1e-9, "mean progeny at lambda->0");
  c.expect(std::abs(mean_progeny(l1, 2.0) - (1.0 + std::sqrt(2.0))) < 1e-9,
           "mean progeny at lambda1");
  c.detail << "identities hold; mean_progeny(lambda1,2)=" << fmt(mean_progeny(l1, 2.0));
}

// --- 2. oracle equivalence -------------------------------------------------

void check_oracle_equivalence(Ctx& c) {
  const TreeStream stream(ChildLaw::regular(2), 0);
  const auto graph = CtmcGraph::from_tree(truncate(stream, 2));
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  lim.depth_limit = 2;
  const std::uint64_t n = 100000;
  for (double lam : {0.3, 1.0}) {
    std::vector<std::uint64_t> a(8, 0), b(8, 0);
    std::vector<std::uint8_t> za(n), zb(n);
    for_each_trial(n, c.workers, [&](std::uint64_t i) {
      za[i] = static_cast<std::uint8_t>(
          gillespie_run(graph, initial_state(graph), lam, trial_key(c.opts.base_seed, i))
              .progeny);
      zb[i] = static_cast<std::uint8_t>(
          run_trial(law, lam, lim, trial_key(c.opts.base_seed + 1, i)).progeny);
    });
    for (std::uint64_t i = 0; i < n; ++i) {
      ++a[za[i]];
      ++b[zb[i]];
    }
    const double tv = empirical_tv_distance(a, b);
    c.expect(tv < 0.01, "TV at lambda=" + fmt(lam));
    c.detail << " tv(" << fmt(lam) << ")=" << fmt(tv);
  }
}

// --- 3. exponential races --------------------------------------------------

void check_exponential_races(Ctx& c) {
  for (double lam : {0.5, 1.0, 2.0}) {
    const auto p = estimate_survival(ChildLaw::regular(1), lam, 1, 100000,
                                     c.opts.base_seed + 10, c.workers);
    const double want = lam / (1.0 + lam);
    const double half = 0.5 * (p.ci_hi - p.ci_lo);
    c.expect(std::abs(p.estimate - want) < 3.0 * half, "chain race lambda=" + fmt(lam));
    c.detail << " chain(" << fmt(lam) << ")=" << fmt(p.estimate);
  }
  SimLimits lim;
  lim.depth_limit = 1;  // progeny stays 1 iff no first-generation infection
  for (double d : {2.0, 3.0}) {
    const auto law = ChildLaw::regular(static_cast<std::uint32_t>(d));
    for (double lam : {0.5, 1.0}) {
      const std::uint64_t n = 100000;
      std::vector<std::uint8_t> one(n);
      for_each_trial(n, c.workers, [&](std::uint64_t i) {
        one[i] = run_trial(law, lam, lim, trial_key(c.opts.base_seed + 11, i)).progeny == 1;
      });
      std::uint64_t ones = 0;
      for (auto v : one) ones += v;
      const double want = 1.0 / (1.0 + d * lam);
      const auto ci = wilson_ci(ones, n);
      const double half = 0.5 * (ci.hi - ci.lo);
      const double est = static_cast<double>(ones) / static_cast<double>(n);
      c.expect(std::abs(est - want) < 3.0 * half,
               "P(Z=1) d=" + fmt(d) + " lambda=" + fmt(lam));
    }
  }
}

// --- 4. first moment -------------------------------------------------------

void check_first_moment(Ctx& c) {
  const auto law = ChildLaw::regular(2);
  SimLimits lim;
  {
    const auto s = sample_progeny(law, 0.1, 1000000, lim, c.opts.base_seed + 20, c.workers);
    const auto rm = robust_mean(std::span<const std::uint64_t>(s.values), 50);
    const double want = mean_progeny(0.1, 2.0);
    c.expect(want >= rm.ci_lo && want <= rm.ci_hi, "E[Z] in robust CI");
    c.detail << " EZ=" << fmt(rm.estimate) << " want " << fmt(want);
  }
  {
    SimLimits lim1;
    lim1.root_recovery_override = 1.0;
    const auto s = sample_progeny(law, 0.1, 1000000, lim1, c.opts.base_seed + 21, c.workers);
    const auto rm = robust_mean(std::span<const std::uint64_t>(s.values), 50);
    const double want = mean_profile(0.1, 2.0, 1.0);
    c.expect(want >= rm.ci_lo && want <= rm.ci_hi, "E[Y(1)] in robust CI");
    c.detail << " EY1=" << fmt(rm.estimate) << " want " << fmt(want);
  }
  {
    const auto it = mean_profile_iteration(0.1, 2.0);
    double sup = 0.0;
    for (std::size_t i = 0; i < it.t.size() && it.t[i] <= 20.0; ++i)
      sup = std::max(sup, std::abs(it.g[i] - mean_profile(0.1, 2.0, it.t[i])));
    c.expect(sup < 1e-6, "profile iteration sup error");
    c.detail << " profile_sup=" << fmt(sup);
  }
}

// --- 5. tail exponent ------------------------------------------------------

void check_tail_exponent(Ctx& c) {
  const auto sp = spectral(0.15, 2.0);
  const double right = sp.beta / sp.alpha;   // 2.4
  const double wrong = sp.alpha / sp.beta;   // 0.41667, the regression trap
  const double target = c.opts.inject_wrong_gamma ? wrong : right;
  SimLimits lim;
  lim.vertex_budget = 50'000'000;
  const auto s =
      sample_progeny(ChildLaw::regular(2), 0.15, 4'000'000, lim, c.opts.base_seed + 30,
                     c.workers);
  const auto est =
      hill_exponent(std::span<const std::uint64_t>(s.values), 400, s.capped_fraction());
  const double band = 0.4;
  c.expect(std::abs(est.exponent - target) < band, "hill within band of target");
  if (!c.opts.inject_wrong_gamma)
    c.expect(std::abs(est.exponent - wrong) > 1.0, "alpha/beta value far outside");
  c.detail << " hill=" << fmt(est.exponent) << " target=" << fmt(target)
           << " capped_fraction=" << fmt(est.capped_fraction);
}

// --- 6. phase transition ---------------------------------------------------

void check_phase_transition(Ctx& c) {
  const auto law = ChildLaw::regular(2);
  for (double lam : {0.05, 0.10, 0.15}) {
    const auto p = estimate_survival(law, lam, 60, 10000, c.opts.base_seed + 40, c.workers);
    c.expect(p.estimate == 0.0, "subcritical reach lambda=" + fmt(lam));
  }
  for (double lam : {0.5, 0.9}) {
    const auto p = estimate_survival(law, lam, 60, 10000, c.opts.base_seed + 41, c.workers);
    c.expect(p.estimate > 0.0, "supercritical reach lambda=" + fmt(lam));
    c.detail << " reach60(" << fmt(lam) << ")=" << fmt(p.estimate);
  }
  const auto sub = ba_estimate_extinction(0.2, 1000, 100000, c.opts.base_seed + 42, c.workers);
  c.expect(sub.estimate >= 0.99, "ba extinct fraction at 0.2");
  const auto sup =
      ba_estimate_extinction(0.5, 4000, 20000, c.opts.base_seed + 43, c.workers);
  c.expect(sup.estimate > 0.0 && sup.estimate < 1.0, "ba interior at 0.5");
  c.detail << " ba(0.2)=" << fmt(sub.estimate) << " ba(0.5)=" << fmt(sup.estimate);
}

// --- 7. analytic vs Monte Carlo --------------------------------------------

void check_analytic_vs_mc(Ctx& c) {
  {
    const auto sol = ba_fixed_point(0.5);
    const auto mc =
        ba_estimate_extinction(0.5, 20000, 30000, c.opts.base_seed + 50, c.workers);
    const double slack = (sol.q_hi - sol.q_lo);
    c.expect(sol.q >= mc.ci_lo - slack && sol.q <= mc.ci_hi + slack, "ba q vs MC");
    c.detail << " ba_q=" << fmt(sol.q) << " mc=[" << fmt(mc.ci_lo) << "," << fmt(mc.ci_hi)
             << "]";
  }
  {
    const auto d2 = OffspringDistribution::point_mass(2);
    const auto sol = ce_fixed_point(0.9, d2);
    const auto law = ChildLaw::regular(2);
    const auto reach60 =
        estimate_survival(law, 0.9, 60, 10000, c.opts.base_seed + 51, c.workers);
    const auto reach80 =
        estimate_survival(law, 0.9, 80, 10000, c.opts.base_seed + 52, c.workers);
    // depth-n reach upper-bounds survival and decreases toward it
    c.expect(sol.survival <= reach60.ci_hi, "ce survival below depth-60 reach");
    c.expect(sol.survival >= reach80.ci_lo, "ce survival above depth-80 floor");
    c.detail << " ce_surv=" << fmt(sol.survival) << " reach60=" << fmt(reach60.estimate)
             << " reach80=" << fmt(reach80.estimate);
  }
}

// --- 8. cross-method agreement ---------------------------------------------

void check_cross_method(Ctx& c) {
  for (double lam : {0.3, 0.5, 0.8}) {
    const double dq = std::abs(ba_fixed_point(lam).q - ba_operator_iterate(lam).q);
    c.expect(dq < 1e-4, "ba dq at " + fmt(lam));
    c.detail << " ba_dq(" << fmt(lam) << ")=" << fmt(dq);
  }
  const auto d2 = OffspringDistribution::point_mass(2);
  for (double lam : {0.3, 0.6, 0.9}) {
    const double dq = std::abs(ce_fixed_point(lam, d2).q - ce_operator_iterate(lam, d2).q);
    c.expect(dq < 1e-4, "ce dq at " + fmt(lam));
    c.detail << " ce_dq(" << fmt(lam) << ")=" << fmt(dq);
  }
}

// --- 9. near-critical scaling ----------------------------------------------

void check_near_critical(Ctx& c) {
  const std::vector<double> omegas = {0.05, 0.06, 0.075, 0.09, 0.11, 0.13, 0.15};
  {
    std::vector<double> xs, ys;
    for (double om : omegas) {
      const auto sol = ba_fixed_point(0.25 + om * om);
      xs.push_back(-1.0 / om);
      ys.push_back(std::log(sol.survival));
    }
    const double slope = ols_slope(xs, ys);
    const double want = std::numbers::pi / 2.0;
    c.expect(std::abs(slope - want) / want < 0.10, "ba slope");
    c.detail << " ba_slope=" << fmt(slope) << " (pi/2=" << fmt(want) << ")";
  }
  {
    const auto d2 = OffspringDistribution::point_mass(2);
    const double l1 = lambda1(2.0);
    std::vector<double> xs, ys;
    for (double om : omegas) {
      const auto sol = ce_fixed_point(l1 + om * om, d2);
      xs.push_back(-1.0 / om);
      ys.push_back(std::log(sol.survival));
    }
    const double slope = ols_slope(xs, ys);
    const double want = (1.0 - l1) * std::numbers::pi / (2.0 * std::pow(2.0, 0.25));
    c.expect(std::abs(slope - want) / want < 0.15, "ce slope");
    c.detail << " ce_slope=" << fmt(slope) << " (want " << fmt(want) << ")";
  }
}

// --- 10. invariants ---------------------------------------------------------

void check_invariants(Ctx& c) {
  {
    const auto sol = ba_fixed_point(0.5);
    bool in_strip = true;
    for (std::size_t i = 1; i < sol.t.size() && sol.t[i] <= sol.tracked_until; ++i)
      in_strip = in_strip && sol.xp[i] > 0.0 && sol.xp[i] < 0.5 &&
                 sol.xp[i] > -0.5 * std::expm1(-sol.x[i]);
    c.expect(in_strip, "ba trajectory in invariant strip");
  }
  {
    const auto sol = ce_fixed_point(0.9, OffspringDistribution::point_mass(2));
    bool in_box = true;
    for (std::size_t i = 1; i < sol.t.size() && sol.t[i] <= sol.tracked_until; ++i)
      in_box = in_box && sol.xp[i] > -1.0 && sol.xp[i] < 0.0 && sol.x[i] > sol.rho - 1e-7 &&
               sol.x[i] <= 1.0;
    c.expect(in_box, "ce trajectory in box");
  }
  {
    const TreeStream stream(ChildLaw::regular(3), 5);
    const auto tree = truncate(stream, 4);
    bool identity = true;
    for (std::uint32_t rounds = 0; rounds <= 4; ++rounds) {
      std::uint64_t expect = 0;
      for (std::uint32_t k = 0; k + rounds <= 4; ++k)
        expect += static_cast<std::uint64_t>(std::llround(std::pow(3.0, k)));
      identity = identity && iterative_prune(tree, 3, rounds).size() == expect;
    }
    c.expect(identity, "complete k-ary pruning identity");

    const TreeStream gw(ChildLaw::parse("0:0.2,1:0.3,2:0.2,3:0.3"), c.opts.base_seed);
    const auto random_tree = truncate(gw, 7);
    std::size_t prev = random_tree.size();
    bool monotone = true;
    for (std::uint32_t j = 1; j <= 5; ++j) {
      const auto pruned = iterative_prune(random_tree, 2, j);
      monotone = monotone && pruned.size() <= prev;
      prev = pruned.size();
    }
    c.expect(monotone, "pruning monotone in rounds");
  }
  {
    auto run_phase = [&](int workers) {
      std::ostringstream out;
      std::vector<PhasePoint> rows;
      for (double lam : {0.4, 0.6})
        rows.push_back(estimate_survival(ChildLaw::regular(2), lam, 25, 4000,
                                         c.opts.base_seed + 60, workers));
      write_phase_table(out, rows, OutputFormat::csv);
      return out.str();
    };
    const std::string w1 = run_phase(1);
    const std::string w2 = run_phase(2);
    const std::string w1again = run_phase(1);
    c.expect(w1 == w2, "worker-count invariance");
    c.expect(w1 == w1again, "repeat-run determinism");
  }
}

const std::vector<Check>& registry() {
  static const std::vector<Check> checks = {
      {"closed_forms", check_closed_forms},
      {"oracle_equivalence", check_oracle_equivalence},
      {"exponential_races", check_exponential_races},
      {"first_moment", check_first_moment},
      {"tail_exponent", check_tail_exponent},
      {"phase_transition", check_phase_transition},
      {"analytic_vs_mc", check_analytic_vs_mc},
      {"cross_method", check_cross_method},
      {"near_critical_scaling", check_near_critical},
      {"invariants", check_invariants},
  };
  return checks;
}

bool selected(const std::string& name, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  for (const auto& f : filter)
    if (name.find(f) != std::string::npos) return true;
  return false;
}

}  // namespace

std::vector<std::string> list_checks() {
  std::vector<std::string> names;
  for (const auto& check : registry()) names.push_back(check.name);
  return names;
}

std::vector<CheckResult> run_checks(const VerifyOptions& opts, std::ostream* progress) {
  std::vector<CheckResult> results;
  for (const auto& check : registry()) {
    if (!selected(check.name, opts.filter)) continue;
    Ctx ctx;
    ctx.opts = opts;
    ctx.workers = opts.workers > 0 ? opts.workers : default_worker_count();
    const auto start = std::chrono::steady_clock::now();
    try {
      check.fn(ctx);
    } catch (const std::exception& e) {
      ctx.ok = false;
      ctx.detail << " EXCEPTION[" << e.what() << "]";
    }
    CheckResult r;
    r.name = check.name;
    r.pass = ctx.ok;
    r.detail = ctx.detail.str();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress)
      (*progress) << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ":" << r.detail << " ("
                  << fmt(r.seconds) << "s)\n";
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace treelab

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treelab/offspring.hpp"

namespace treelab {

struct SolverConfig {
  double t_max = 60.0;
  double step = 1e-3;
  double bisection_tol = 1e-12;   // absolute tolerance on x'(0)
  int operator_iters = 10'000;
  double operator_tol = 1e-10;    // sup-norm increment
  double gray_zone = 1e-3;        // CE phase-portrait crossing margin near x = 1
  int max_bisection_iters = 256;
};

enum class SolveMethod { shooting, operator_iteration };

// Discretized fixed-point solution of the survival problem. `x` holds the
// fixed-point function on a uniform grid; past `tracked_until` the values
// come from the analytic relaxation toward the known limit (the trajectory
// itself can no longer be followed in finite precision there, but its
// contribution to q is bracketed).
struct OdeSolution {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> xp;
  double xprime0 = 0.0;
  double q = 1.0;          // extinction probability
  double q_lo = 1.0;
  double q_hi = 1.0;
  double survival = 0.0;   // 1 - q, computed directly so tiny values survive
  double rho = 0.0;        // GW extinction probability (CE only)
  SolveMethod method = SolveMethod::shooting;
  double tracked_until = 0.0;
  int iterations = 0;
  std::string note;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
  double bracket_lo;
  double bracket_hi;
};

using IterationWatcher = std::function<void(const std::vector<double>&)>;

// Birth-and-assassination survival via shooting on x'' - x' + phi(x) = 0,
// phi(y) = lambda (1 - e^{-y}), x(0) = 0. Trivial (q = 1) for lambda <= 1/4.
OdeSolution ba_fixed_point(double lambda, const SolverConfig& cfg = {});

// Same object by monotone iteration of the integral operator from the
// supersolution y0 ~ lambda t; converges to the maximal fixed point.
OdeSolution ba_operator_iterate(double lambda, const SolverConfig& cfg = {},
                                const IterationWatcher& watch = {});

// Chase-escape survival on a GW tree via shooting on
// x'' - (1-lambda) x' + phi(x) = 0, phi(x) = lambda (psi(x) - x), x(0) = 1.
// Trivial (q = 1) for lambda <= lambda1(d). Falls back to the operator
// method when the phase-portrait classification stays ambiguous; the
// `method` field reports which route produced the answer.
OdeSolution ce_fixed_point(double lambda, const OffspringDistribution& dist,
                           const SolverConfig& cfg = {});

// Monotone iteration from the subsolution y0 = rho up to the minimal fixed
// point above rho.
OdeSolution ce_operator_iterate(double lambda, const OffspringDistribution& dist,
                                const SolverConfig& cfg = {},
                                const IterationWatcher& watch = {});

struct ProfileIteration {
  std::vector<double> t;
  std::vector<double> g;
  int iterations = 0;
};

// First-moment iteration g_{n+1} = Phi(g_n) from g0 = 1; the limit is the
// mean conditional-progeny profile. Divergence (lambda above lambda1) is
// reported as a domain error.
ProfileIteration mean_profile_iteration(double lambda, double d, const SolverConfig& cfg = {},
                                        const IterationWatcher& watch = {});

}  // namespace treelab

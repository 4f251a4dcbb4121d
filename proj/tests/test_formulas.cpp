#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "treelab/formulas.hpp"

using namespace treelab;

namespace {

// Test-local quadrature, independent of any solver code.
template <typename F>
double integrate(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("formulas") {

TEST_CASE("critical intensity") {
  CHECK(lambda1(2.0) == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lambda1(4.0) == doctest::Approx(7.0 - 4.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(1e4 * lambda1(1e4) - 0.25) < 1e-4);
  CHECK_THROWS_AS(lambda1(1.0), std::domain_error);
  // lambda1 and its conjugate multiply to one
  CHECK(lambda1(3.0) * lambda2(3.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectral pair") {
  const auto sp = spectral(0.1, 2.0);
  CHECK(sp.delta == doctest::Approx(0.41).epsilon(1e-12));
  CHECK(sp.alpha == doctest::Approx(0.1298437881283576).epsilon(1e-12));
  CHECK(sp.beta == doctest::Approx(0.7701562118716424).epsilon(1e-12));

  SUBCASE("double root at criticality") {
    const auto crit = spectral(lambda1(2.0), 2.0);
    CHECK(crit.delta == 0.0);
    CHECK(crit.alpha == crit.beta);
  }
  SUBCASE("Vieta identities on a grid") {
    for (double d : {2.0, 3.0, 5.0, 10.0}) {
      const double l1 = lambda1(d);
      for (int i = 1; i <= 20; ++i) {
        const double lam = l1 * i / 20.0;
        const auto s = spectral(lam, d);
        CHECK(std::abs(s.alpha + s.beta - (1.0 - lam)) < 1e-12);
        CHECK(std::abs(s.alpha * s.beta - lam * (d - 1.0)) < 1e-12);
      }
    }
  }
  SUBCASE("rejected past lambda1") {
    CHECK_THROWS_AS(spectral(0.2, 2.0), std::domain_error);
  }
}

TEST_CASE("mean progeny") {
  CHECK(mean_progeny(1e-12, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean_progeny(lambda1(2.0), 2.0) ==
        doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-9));
  CHECK(mean_progeny(0.1, 2.0) == doctest::Approx(1.2984378812835757).epsilon(1e-12));
}

TEST_CASE("mean profile") {
  CHECK(mean_profile(0.1, 2.0, 0.0) == doctest::Approx(1.0));
  CHECK(mean_profile(0.05, 5.0, 0.0) == doctest::Approx(1.0));
  CHECK(mean_profile(0.1, 2.0, 1.0) == doctest::Approx(1.2773009974111793).epsilon(1e-12));
  // int_0^inf h(t) e^{-t} dt recovers the mean progeny
  const double quad =
      integrate([](double t) { return mean_profile(0.1, 2.0, t) * std::exp(-t); }, 0.0, 80.0,
                200000);
  CHECK(quad == doctest::Approx(mean_progeny(0.1, 2.0)).epsilon(1e-8));
}

TEST_CASE("tail exponent gamma_bar") {
  CHECK(gamma_bar(0.15, 2.0) == doctest::Approx(2.4).epsilon(1e-12));
  // diverges to 1/((d-1) lambda) at small lambda
  CHECK(1e-4 * (2.0 - 1.0) * gamma_bar(1e-4, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
  // tends to 1 at criticality
  CHECK(gamma_bar(lambda1(2.0) - 1e-8, 2.0) < 1.0 + 1e-3);
  CHECK(gamma_of_lambda(0.15, 2.0, 1.7) == doctest::Approx(1.7));
  CHECK(gamma_of_lambda(0.15, 2.0, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(2.4));
}

TEST_CASE("moment thresholds lambda_u") {
  for (double d : {2.0, 3.0, 5.0})
    CHECK(lambda_u(1.0, d) == doctest::Approx(lambda1(d)).epsilon(1e-12));
  SUBCASE("inverse of gamma_bar along the critical curve") {
    for (double u : {1.5, 2.0, 3.0})
      for (double d : {2.0, 3.0, 5.0})
        CHECK(gamma_bar(lambda_u(u, d), d) == doctest::Approx(u).epsilon(1e-9));
  }
  SUBCASE("decreasing in u") {
    CHECK(lambda_u(3.0, 2.0) < lambda_u(2.0, 2.0));
    CHECK(lambda_u(2.0, 2.0) < lambda_u(1.0, 2.0));
  }
}

TEST_CASE("large deviation pieces") {
  CHECK(rate_j(1.0) == doctest::Approx(0.0));
  CHECK(rate_j(2.0) == doctest::Approx(1.0 - std::log(2.0)));
  CHECK_THROWS_AS(rate_j(0.0), std::domain_error);

  SUBCASE("g_delta minimum location and value") {
    const auto m = g_delta_min(0.5, 2.0);
    CHECK(m.argmin == doctest::Approx(0.75));
    CHECK(m.value == doctest::Approx(g_delta(0.75, 0.5, 2.0)).epsilon(1e-12));
    // interior minimum: nearby points are no smaller
    CHECK(g_delta(0.74, 0.5, 2.0) >= m.value);
    CHECK(g_delta(0.76, 0.5, 2.0) >= m.value);
  }
  SUBCASE("sign of min g_d flips exactly at lambda1") {
    const double l1 = lambda1(2.0);
    CHECK(g_delta_min(l1 - 1e-6, 2.0).value > 0.0);
    CHECK(g_delta_min(l1 + 1e-6, 2.0).value < 0.0);
  }
  SUBCASE("algebraic rearrangement of g_delta") {
    for (double x : {0.3, 0.75, 1.4})
      for (double lam : {0.2, 0.5, 0.9}) {
        const double lhs = g_delta(x, lam, 2.0) + 2.0 - (1.0 + lam) / x;
        CHECK(lhs == doctest::Approx(std::log(x * x / (lam * 2.0))).epsilon(1e-12));
      }
  }
}

TEST_CASE("shooting-parameter envelopes") {
  SUBCASE("ba: ordered for all omega in (0, 0.2]") {
    for (int i = 1; i <= 20; ++i) {
      const auto env = ba_xprime_envelope(0.01 * i);
      CHECK(env.lower < env.upper);
      CHECK(env.lower > 0.0);
    }
  }
  SUBCASE("ba: exponent approaches pi") {
    const auto env = ba_xprime_envelope(0.01);
    const double exponent = -2.0 * 0.01 * std::log(env.upper);
    CHECK(std::abs(exponent - 3.141592653589793) / 3.141592653589793 < 0.01);
  }
  SUBCASE("ce: magnitude bracket at d = 2") {
    const auto env = ce_xprime_envelope(0.2, 2.0);
    CHECK(env.lower < env.upper);
    // frequency scale at criticality equals (d(d-1))^{1/4}
    CHECK(ce_critical_scale(lambda1(2.0), 2.0) ==
          doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
    CHECK_THROWS_AS(ce_xprime_envelope(0.1, 2.0), std::domain_error);
  }
}

}  // TEST_SUITE

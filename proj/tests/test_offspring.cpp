#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "treelab/offspring.hpp"

using namespace treelab;

TEST_SUITE("offspring") {

TEST_CASE("construction and validation") {
  CHECK(OffspringDistribution::from_pmf({{2, 1.0}}).mean() == doctest::Approx(2.0));
  CHECK(OffspringDistribution::from_pmf({{0, 0.25}, {2, 0.75}}).mean() ==
        doctest::Approx(1.5));
  // subcritical and critical means are rejected
  CHECK_THROWS_AS(OffspringDistribution::from_pmf({{1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution::from_pmf({{0, 0.5}, {2, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OffspringDistribution::from_pmf({{0, 0.3}, {2, 0.6}}),
                  std::invalid_argument);  // weights sum to 0.9
  CHECK_THROWS_AS(OffspringDistribution::from_pmf({{2, 0.5}, {2, 0.5}}),
                  std::invalid_argument);  // duplicate k
  CHECK_THROWS_AS(OffspringDistribution::from_pmf({{2, 1.2}, {3, -0.2}}),
                  std::invalid_argument);  // negative weight
}

TEST_CASE("generating function") {
  const auto binary = OffspringDistribution::point_mass(2);
  CHECK(binary.psi(0.5) == doctest::Approx(0.25));
  CHECK(binary.psi_prime(0.5) == doctest::Approx(1.0));
  CHECK(binary.psi_second(0.5) == doctest::Approx(2.0));
  CHECK(binary.psi(1.0) == doctest::Approx(1.0));

  const auto gw = OffspringDistribution::from_pmf({{0, 0.25}, {2, 0.75}});
  CHECK(gw.psi(1.0) == doctest::Approx(1.0));
  CHECK(gw.psi_prime(1.0) == doctest::Approx(gw.mean()));
  CHECK_THROWS_AS(gw.psi(1.5), std::invalid_argument);
  CHECK_THROWS_AS(gw.psi(-0.1), std::invalid_argument);

  SUBCASE("monotone and convex on a grid") {
    for (int i = 0; i <= 100; ++i) {
      const double x = i / 100.0;
      CHECK(gw.psi_prime(x) >= 0.0);
      CHECK(gw.psi_second(x) >= 0.0);
    }
  }
  SUBCASE("second-moment inequality at 1") {
    for (const auto& d : {binary, gw, OffspringDistribution::from_pmf({{1, 0.4}, {3, 0.6}})})
      CHECK(d.psi_second(1.0) >= d.mean() * (d.mean() - 1.0) - 1e-12);
  }
  SUBCASE("accurate 1 - psi near 1") {
    const double x = 1.0 - 1e-12;
    CHECK(gw.one_minus_psi(x) == doctest::Approx(gw.mean() * 1e-12).epsilon(1e-3));
  }
}

TEST_CASE("extinction probability") {
  CHECK(OffspringDistribution::point_mass(2).extinction_prob() == doctest::Approx(0.0));
  const auto gw = OffspringDistribution::from_pmf({{0, 0.25}, {2, 0.75}});
  const double rho = gw.extinction_prob();
  CHECK(rho == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(gw.psi(rho) - rho) < 1e-10);

  SUBCASE("approaches 1 toward criticality") {
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      const auto d = OffspringDistribution::from_pmf({{0, 0.5 - eps}, {2, 0.5 + eps}});
      const double r = d.extinction_prob();
      CHECK(std::abs(d.psi(r) - r) < 1e-10);
      CHECK(r > prev);
      prev = r;
    }
    CHECK(prev > 0.99);  // (1-2e)/(1+2e) at e = 1e-3
  }
}

TEST_CASE("finite support has all moments") {
  CHECK(std::isinf(OffspringDistribution::point_mass(2).gamma_p()));
  CHECK(std::isinf(
      OffspringDistribution::from_pmf({{0, 0.25}, {2, 0.75}}).gamma_p()));
}

TEST_CASE("child law parsing") {
  CHECK(ChildLaw::parse("dary:3").is_regular());
  CHECK(ChildLaw::parse("dary:3").regular_k() == 3);
  CHECK(ChildLaw::parse("dary:1").regular_k() == 1);  // chains are allowed here
  CHECK(ChildLaw::parse("1:1").regular_k() == 1);     // single atom folds to regular
  const auto gw = ChildLaw::parse("0:0.25,2:0.75");
  CHECK(!gw.is_regular());
  CHECK(gw.mean() == doctest::Approx(1.5));
  CHECK(gw.dist().max_k() == 2);
  CHECK_THROWS_AS(ChildLaw::parse("dary:0"), std::invalid_argument);
  CHECK_THROWS_AS(ChildLaw::parse("0:0.5,1:0.5"), std::invalid_argument);  // mean 0.5
  CHECK_THROWS_AS(ChildLaw::parse("junk"), std::invalid_argument);
  CHECK(ChildLaw::parse("dary:4").as_distribution().mean() == doctest::Approx(4.0));
}

}  // TEST_SUITE

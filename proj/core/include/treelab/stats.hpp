#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace treelab {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// 95% score interval for a binomial proportion (z defaults to 1.96).
WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

// One row of a parameter sweep / estimation run.
struct PhasePoint {
  std::string process;  // "ce" or "ba"
  double lambda = 0.0;
  double d = 0.0;       // mean offspring; NaN for the BA process
  std::int64_t depth = 0;  // truncation depth (ce) or particle cap (ba)
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
};

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased

// Two-sided Kolmogorov-Smirnov test of xs against the unit exponential;
// returns the asymptotic p-value.
double ks_exp1_pvalue(std::span<const double> xs);

// Least-squares slope of y against x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// Total variation distance between two empirical pmfs over {0,...,max}.
double empirical_tv_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace treelab

#include "treelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace treelab {

WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_ci needs trials >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double sample_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs >= 2 samples");
  const double m = sample_mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

double ks_exp1_pvalue(std::span<const double> xs) {
  if (xs.size() < 8) throw std::invalid_argument("KS test needs >= 8 samples");
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = -std::expm1(-s[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    dmax = std::max({dmax, std::abs(f - lo), std::abs(f - hi)});
  }
  // Kolmogorov distribution tail, alternating series.
  const double t = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ols_slope needs two aligned samples");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("ols_slope: degenerate x");
  return sxy / sxx;
}

double empirical_tv_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::uint64_t na = 0, nb = 0;
  for (auto v : a) na += v;
  for (auto v : b) nb += v;
  if (na == 0 || nb == 0) throw std::invalid_argument("empty histogram");
  const std::size_t m = std::max(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pa = i < a.size() ? static_cast<double>(a[i]) / static_cast<double>(na) : 0.0;
    const double pb = i < b.size() ? static_cast<double>(b[i]) / static_cast<double>(nb) : 0.0;
    acc += std::abs(pa - pb);
  }
  return 0.5 * acc;
}

}  // namespace treelab

#include "treelab/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treelab/stats.hpp"

namespace treelab {

int default_hill_k(std::size_t n) {
  return std::max(10, static_cast<int>(std::llround(std::pow(static_cast<double>(n), 2.0 / 3.0))));
}

TailEstimate hill_exponent(std::span<const double> samples, int k, double capped_fraction) {
  if (k < 10) throw std::invalid_argument("hill_exponent needs k >= 10");
  if (samples.size() < static_cast<std::size_t>(k) + 10)
    throw std::invalid_argument("hill_exponent needs at least k + 10 samples");
  std::vector<double> top(samples.begin(), samples.end());
  std::nth_element(top.begin(), top.begin() + k, top.end(), std::greater<>());
  const double pivot = top[static_cast<std::size_t>(k)];  // X_(k+1)
  if (!(pivot > 0.0)) throw std::invalid_argument("hill_exponent needs positive samples");
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += std::log(top[static_cast<std::size_t>(i)] / pivot);
  if (acc <= 0.0) throw std::invalid_argument("hill_exponent: degenerate tail (no spread)");
  TailEstimate est;
  est.exponent = static_cast<double>(k) / acc;
  est.k_used = k;
  est.stderr_ = est.exponent / std::sqrt(static_cast<double>(k));
  est.capped_fraction = capped_fraction;
  return est;
}

TailEstimate hill_exponent(std::span<const std::uint64_t> samples, int k,
                           double capped_fraction) {
  std::vector<double> xs(samples.begin(), samples.end());
  return hill_exponent(std::span<const double>(xs), k, capped_fraction);
}

RobustMean robust_mean(std::span<const double> samples, int blocks) {
  if (blocks < 3) throw std::invalid_argument("robust_mean needs blocks >= 3");
  if (samples.size() < static_cast<std::size_t>(blocks))
    throw std::invalid_argument("robust_mean needs at least one sample per block");
  const std::size_t n = samples.size();
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(blocks));
  std::size_t start = 0;
  for (int b = 0; b < blocks; ++b) {
    const std::size_t end = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(blocks);
    double acc = 0.0;
    for (std::size_t i = start; i < end; ++i) acc += samples[i];
    means.push_back(acc / static_cast<double>(end - start));
    start = end;
  }
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const double median = (sorted.size() % 2) ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  double var = 0.0;
  for (double m : means) var += (m - median) * (m - median);
  var /= static_cast<double>(means.size() - 1);
  const double half = 1.96 * std::sqrt(var / static_cast<double>(means.size()));
  return {median, median - half, median + half, blocks};
}

RobustMean robust_mean(std::span<const std::uint64_t> samples, int blocks) {
  std::vector<double> xs(samples.begin(), samples.end());
  return robust_mean(std::span<const double>(xs), blocks);
}

}  // namespace treelab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace treelab {

struct TailEstimate {
  double exponent = 0.0;
  int k_used = 0;
  double stderr_ = 0.0;   // exponent / sqrt(k)
  double capped_fraction = 0.0;
};

// Hill estimator over the top k order statistics of positive samples.
// Capped samples must be excluded by the caller; their fraction is passed
// through for reporting. Needs at least k + 10 samples and a non-degenerate
// tail (constant input is rejected).
TailEstimate hill_exponent(std::span<const double> samples, int k, double capped_fraction = 0.0);
TailEstimate hill_exponent(std::span<const std::uint64_t> samples, int k,
                           double capped_fraction = 0.0);

// Default Hill window: floor(n^{2/3}).
int default_hill_k(std::size_t n);

struct RobustMean {
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int blocks = 0;
};

// Median of per-block means over `blocks` contiguous blocks; the interval is
// 1.96 block-spread standard errors around the estimate.
RobustMean robust_mean(std::span<const double> samples, int blocks);
RobustMean robust_mean(std::span<const std::uint64_t> samples, int blocks);

}  // namespace treelab

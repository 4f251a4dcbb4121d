#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treelab {

// Finite-support offspring law of a Galton-Watson tree, with its generating
// function psi and derived quantities. Construction validates that the pmf
// sums to one and that the mean is strictly supercritical (d > 1); laws with
// d <= 1 are rejected here (use ChildLaw::regular for deterministic chains).
class OffspringDistribution {
 public:
  static OffspringDistribution from_pmf(std::vector<std::pair<std::uint32_t, double>> pmf);
  // Point mass at k, k >= 2.
  static OffspringDistribution point_mass(std::uint32_t k);

  double mean() const { return mean_; }
  std::uint32_t max_k() const { return pmf_.back().first; }
  const std::vector<std::pair<std::uint32_t, double>>& pmf() const { return pmf_; }

  // Generating function psi(x) = sum p_k x^k and derivatives, x in [0,1].
  double psi(double x) const;
  double psi_prime(double x) const;
  double psi_second(double x) const;
  // 1 - psi(x), accurate when x is close to 1.
  double one_minus_psi(double x) const;

  // Fixed point rho = psi(rho) in [0,1): ordinary GW extinction probability.
  double extinction_prob() const;

  // sup{u >= 1 : sum k^u p_k < inf}; +inf for any finite-support pmf.
  double gamma_p() const;

  // Inverse-CDF sample from a uniform in (0,1).
  std::uint32_t sample(double u) const;

  bool is_point_mass() const { return pmf_.size() == 1; }
  std::string to_string() const;

 private:
  OffspringDistribution() = default;
  std::vector<std::pair<std::uint32_t, double>> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

// Child law of a tree stream: either the deterministic k-regular tree
// (k >= 1, so chains are allowed) or a supercritical GW offspring law.
class ChildLaw {
 public:
  static ChildLaw regular(std::uint32_t k);
  static ChildLaw galton_watson(OffspringDistribution dist);

  // "dary:3" or comma-separated "k:p" pairs, e.g. "0:0.25,2:0.75".
  // A single-atom pmf "k:1" is folded into the regular form.
  static ChildLaw parse(std::string_view text);

  bool is_regular() const { return regular_k_ != 0; }
  std::uint32_t regular_k() const { return regular_k_; }
  const OffspringDistribution& dist() const;
  // GW distribution view; point masses with k >= 2 convert on the fly.
  OffspringDistribution as_distribution() const;

  double mean() const;
  std::uint32_t sample(double u) const;
  std::string to_string() const;

 private:
  std::uint32_t regular_k_ = 0;
  std::vector<OffspringDistribution> dist_;  // empty or one element
};

}  // namespace treelab

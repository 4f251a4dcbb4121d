#include "treelab/offspring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace treelab {

namespace {

constexpr double kPmfSumTol = 1e-12;

}  // namespace

OffspringDistribution OffspringDistribution::from_pmf(
    std::vector<std::pair<std::uint32_t, double>> pmf) {
  if (pmf.empty()) throw std::invalid_argument("offspring pmf is empty");
  double sum = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    auto [k, p] = pmf[i];
    if (p < 0.0) throw std::invalid_argument("offspring pmf has a negative weight");
    if (i > 0 && pmf[i - 1].first >= k)
      throw std::invalid_argument("offspring pmf must be sorted by k without duplicates");
    sum += p;
    mean += static_cast<double>(k) * p;
  }
  if (std::abs(sum - 1.0) > kPmfSumTol)
    throw std::invalid_argument("offspring pmf weights must sum to 1 within 1e-12");
  if (!(mean > 1.0))
    throw std::invalid_argument("offspring mean d must exceed 1 (got " +
                                std::to_string(mean) + ")");
  OffspringDistribution d;
  d.pmf_ = std::move(pmf);
  d.mean_ = mean;
  d.cdf_.reserve(d.pmf_.size());
  double cum = 0.0;
  for (auto& [k, p] : d.pmf_) {
    cum += p;
    d.cdf_.push_back(cum);
  }
  d.cdf_.back() = 1.0;
  return d;
}

OffspringDistribution OffspringDistribution::point_mass(std::uint32_t k) {
  if (k < 2) throw std::invalid_argument("point-mass offspring law needs k >= 2");
  return from_pmf({{k, 1.0}});
}

double OffspringDistribution::psi(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("psi domain is [0,1]");
  double acc = 0.0;
  for (auto& [k, p] : pmf_) acc += p * std::pow(x, static_cast<double>(k));
  return acc;
}

double OffspringDistribution::psi_prime(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("psi domain is [0,1]");
  double acc = 0.0;
  for (auto& [k, p] : pmf_) {
    if (k == 0) continue;
    acc += p * static_cast<double>(k) * std::pow(x, static_cast<double>(k - 1));
  }
  return acc;
}

double OffspringDistribution::psi_second(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("psi domain is [0,1]");
  double acc = 0.0;
  for (auto& [k, p] : pmf_) {
    if (k < 2) continue;
    acc += p * static_cast<double>(k) * static_cast<double>(k - 1) *
           std::pow(x, static_cast<double>(k - 2));
  }
  return acc;
}

double OffspringDistribution::one_minus_psi(double x) const {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("psi domain is [0,1]");
  // 1 - x^k = -expm1(k log(x)) avoids cancellation near x = 1.
  if (x == 0.0) return 1.0 - psi(0.0);
  const double lx = std::log1p(x - 1.0);
  double acc = 0.0;
  for (auto& [k, p] : pmf_) {
    if (k == 0) {
      acc += 0.0;
    } else {
      acc += p * (-std::expm1(static_cast<double>(k) * lx));
    }
  }
  return acc;
}

double OffspringDistribution::extinction_prob() const {
  if (pmf_.front().first != 0 || pmf_.front().second == 0.0) return 0.0;
  // psi(x) - x is positive at 0 (= p0) and negative just below 1 when d > 1;
  // bisect, then polish with Newton.
  double lo = 0.0, hi = 1.0 - 1e-9;
  if (psi(hi) - hi >= 0.0) return 1.0;  // numerically at criticality
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hi);
    ((psi(mid) - mid >= 0.0) ? lo : hi) = mid;
  }
  double rho = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    double denom = psi_prime(rho) - 1.0;
    if (std::abs(denom) < 1e-14) break;
    rho -= (psi(rho) - rho) / denom;
  }
  return std::clamp(rho, 0.0, 1.0);
}

double OffspringDistribution::gamma_p() const {
  return std::numeric_limits<double>::infinity();
}

std::uint32_t OffspringDistribution::sample(double u) const {
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return pmf_[static_cast<std::size_t>(it - cdf_.begin())].first;
}

std::string OffspringDistribution::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    if (i) os << ',';
    os << pmf_[i].first << ':' << pmf_[i].second;
  }
  return os.str();
}

ChildLaw ChildLaw::regular(std::uint32_t k) {
  if (k < 1) throw std::invalid_argument("regular tree needs k >= 1");
  ChildLaw law;
  law.regular_k_ = k;
  return law;
}

ChildLaw ChildLaw::galton_watson(OffspringDistribution dist) {
  ChildLaw law;
  law.dist_.push_back(std::move(dist));
  return law;
}

ChildLaw ChildLaw::parse(std::string_view text) {
  if (text.rfind("dary:", 0) == 0) {
    int k = std::stoi(std::string(text.substr(5)));
    if (k < 1) throw std::invalid_argument("dary:<k> needs k >= 1");
    return regular(static_cast<std::uint32_t>(k));
  }
  std::vector<std::pair<std::uint32_t, double>> pmf;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("pmf entry '" + item + "' is not k:p");
    int k = std::stoi(item.substr(0, colon));
    double p = std::stod(item.substr(colon + 1));
    if (k < 0) throw std::invalid_argument("pmf entry has negative k");
    pmf.emplace_back(static_cast<std::uint32_t>(k), p);
  }
  if (pmf.empty()) throw std::invalid_argument("empty pmf text");
  if (pmf.size() == 1 && std::abs(pmf[0].second - 1.0) <= kPmfSumTol)
    return regular(pmf[0].first);
  std::sort(pmf.begin(), pmf.end());
  return galton_watson(OffspringDistribution::from_pmf(std::move(pmf)));
}

const OffspringDistribution& ChildLaw::dist() const {
  if (dist_.empty())
    throw std::logic_error("regular child law has no offspring distribution");
  return dist_[0];
}

OffspringDistribution ChildLaw::as_distribution() const {
  if (!dist_.empty()) return dist_[0];
  return OffspringDistribution::point_mass(regular_k_);
}

double ChildLaw::mean() const {
  return is_regular() ? static_cast<double>(regular_k_) : dist_[0].mean();
}

std::uint32_t ChildLaw::sample(double u) const {
  return is_regular() ? regular_k_ : dist_[0].sample(u);
}

std::string ChildLaw::to_string() const {
  if (is_regular()) return "dary:" + std::to_string(regular_k_);
  return dist_[0].to_string();
}

}  // namespace treelab

#include "treelab/formulas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace treelab {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

double lambda1(double d) {
  require(d > 1.0, "lambda1 requires d > 1");
  return 2.0 * d - 1.0 - 2.0 * std::sqrt(d * (d - 1.0));
}

double lambda2(double d) {
  require(d > 1.0, "lambda2 requires d > 1");
  return 2.0 * d - 1.0 + 2.0 * std::sqrt(d * (d - 1.0));
}

double discriminant(double lambda, double d) {
  return (lambda - lambda1(d)) * (lambda - lambda2(d));
}

SpectralPair spectral(double lambda, double d) {
  require(lambda > 0.0, "spectral requires lambda > 0");
  const double delta = discriminant(lambda, d);
  if (delta < 0.0)
    throw std::domain_error("spectral: lambda exceeds lambda1(d) = " +
                            std::to_string(lambda1(d)));
  const double s = std::sqrt(delta);
  return {delta, (1.0 - lambda - s) / 2.0, (1.0 - lambda + s) / 2.0};
}

double mean_progeny(double lambda, double d) {
  const auto [delta, alpha, beta] = spectral(lambda, d);
  (void)alpha;
  (void)beta;
  return 2.0 * d / ((d - 1.0) * (1.0 + lambda + std::sqrt(delta))) - 1.0 / (d - 1.0);
}

double mean_profile(double lambda, double d, double t) {
  require(t >= 0.0, "mean_profile requires t >= 0");
  const auto sp = spectral(lambda, d);
  return (d * std::exp(sp.alpha * t) - 1.0) / (d - 1.0);
}

double gamma_bar(double lambda, double d) {
  const auto sp = spectral(lambda, d);
  require(sp.delta > 0.0, "gamma_bar is defined on (0, lambda1)");
  return sp.beta / sp.alpha;
}

double gamma_of_lambda(double lambda, double d, double gamma_p) {
  require(gamma_p >= 1.0, "gamma_p must be >= 1");
  return std::min(gamma_bar(lambda, d), gamma_p);
}

double lambda_u(double u, double d) {
  require(u >= 1.0, "lambda_u requires u >= 1");
  require(d > 1.0, "lambda_u requires d > 1");
  const double a = u * u * (d - 1.0) + 2.0 * u * d + (d - 1.0);
  return (a - std::sqrt(a * a - 4.0 * u * u)) / (2.0 * u);
}

double rate_j(double x) {
  require(x > 0.0, "rate_j requires x > 0");
  return x - std::log(x) - 1.0;
}

double g_delta(double x, double lambda, double delta) {
  require(x > 0.0, "g_delta requires x > 0");
  require(lambda > 0.0 && delta > 0.0, "g_delta requires lambda, delta > 0");
  return (1.0 + lambda) / x + std::log(x * x / (lambda * delta)) - 2.0;
}

GDeltaMin g_delta_min(double lambda, double delta) {
  require(lambda > 0.0 && delta > 0.0, "g_delta_min requires lambda, delta > 0");
  const double c = (1.0 + lambda) / 2.0;
  return {c, std::log((1.0 + lambda) * (1.0 + lambda) / (4.0 * lambda * delta))};
}

Envelope ba_xprime_envelope(double omega) {
  require(omega > 0.0, "ba_xprime_envelope requires omega > 0");
  const double e = std::exp(-std::numbers::pi / (2.0 * omega));
  return {8.0 * std::numbers::e / std::numbers::pi * omega * omega * omega * e,
          std::numbers::e * std::numbers::e / 4.0 * e};
}

double ce_critical_scale(double lambda, double d) {
  require(d > 1.0, "ce_critical_scale requires d > 1");
  const double arg = (2.0 * d - 1.0) + 2.0 * std::sqrt(d * (d - 1.0)) - lambda;
  require(arg > 0.0, "ce_critical_scale: lambda out of range");
  return 0.5 * std::sqrt(arg);
}

Envelope ce_xprime_envelope(double lambda, double d, double c0, double c1) {
  require(lambda < 1.0, "ce_xprime_envelope requires lambda < 1");
  const double l1 = lambda1(d);
  require(lambda > l1, "ce_xprime_envelope requires lambda > lambda1(d)");
  const double omega = ce_critical_scale(lambda, d) * std::sqrt(lambda - l1);
  const double e = std::exp(-std::numbers::pi * (1.0 - lambda) / (2.0 * omega));
  return {c1 * omega * omega * omega * e, c0 * e};
}

}  // namespace treelab

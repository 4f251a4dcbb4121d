#pragma once

namespace treelab {

// Closed forms for the chase-escape process on a tree of mean offspring d
// and for the birth-and-assassination process. All functions are pure and
// throw std::domain_error / std::invalid_argument outside their domain.

// Critical infection intensity: 2d - 1 - 2 sqrt(d(d-1)), d > 1.
double lambda1(double d);

// Conjugate root 2d - 1 + 2 sqrt(d(d-1)); lambda1 * lambda2 = 1.
double lambda2(double d);

// Discriminant of X^2 - (1-lambda) X + lambda (d-1), evaluated in the
// factored form (lambda - lambda1)(lambda - lambda2) so it vanishes exactly
// at the critical intensity.
double discriminant(double lambda, double d);

struct SpectralPair {
  double delta;
  double alpha;  // smaller root
  double beta;   // larger root
};

// Roots of X^2 - (1-lambda) X + lambda (d-1); requires 0 < lambda <= lambda1.
SpectralPair spectral(double lambda, double d);

// Mean total progeny E[Z] on (0, lambda1].
double mean_progeny(double lambda, double d);

// Mean conditional progeny profile h(t) = (d e^{alpha t} - 1)/(d - 1).
double mean_profile(double lambda, double d, double t);

// Tail exponent beta/alpha of Z, defined on (0, lambda1).
double gamma_bar(double lambda, double d);

// min(gamma_bar, gamma_p): annealed moment exponent with an explicit
// offspring-tail cutoff (finite-support laws pass +inf).
double gamma_of_lambda(double lambda, double d, double gamma_p);

// u-th moment threshold; lambda_u(1, d) == lambda1(d).
double lambda_u(double u, double d);

// Cramer rate of the unit exponential: J(x) = x - log x - 1, x > 0.
double rate_j(double x);

// g_delta(x) = (1+lambda)/x + log(x^2/(lambda delta)) - 2, x > 0.
double g_delta(double x, double lambda, double delta);

struct GDeltaMin {
  double argmin;
  double value;
};

// Minimum of g_delta, attained at (1+lambda)/2; its sign at delta = d flips
// exactly at lambda1(d).
GDeltaMin g_delta_min(double lambda, double delta);

struct Envelope {
  double lower;
  double upper;
};

// Leading-order bracket for the BA shooting parameter x'(0) near the
// threshold, omega = sqrt(lambda - 1/4) > 0:
//   lower = (8e/pi) omega^3 exp(-pi/(2 omega)), upper = (e^2/4) exp(-pi/(2 omega)).
Envelope ba_xprime_envelope(double omega);

// Angular frequency scale c(lambda) of the chase-escape linearization.
double ce_critical_scale(double lambda, double d);

// Magnitude bracket for the CE shooting parameter |x'(0)| for
// lambda1 < lambda < 1. The multiplicative constants are not pinned down;
// callers supply c0 (upper) and c1 (lower), both defaulting to 1:
//   lower = c1 omega^3 E, upper = c0 E, E = exp(-pi(1-lambda)/(2 omega)),
// omega = c(lambda) sqrt(lambda - lambda1).
Envelope ce_xprime_envelope(double lambda, double d, double c0 = 1.0, double c1 = 1.0);

}  // namespace treelab

#include "brownray/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace brownray {

namespace {

// Asymptotic expansion erfcx(x) ~ 1/(x sqrt(pi)) * sum (-1)^k (2k-1)!!/(2x^2)^k.
// For x >= 12 the series reaches double round-off well before 24 terms.
double erfcx_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 24; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / (x * std::sqrt(std::numbers::pi));
}

}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows to +inf for x < -26.6,
    // matching the true growth of the function.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 12.0) return std::exp(x * x) * std::erfc(x);
  return erfcx_asymptotic(x);
}

double exp_mul_erfc(double g, double b) {
  if (g == 0.0) return std::erfc(b);
  if (b >= 0.0) {
    // erfc(b) = exp(-b^2) erfcx(b); fold the exponents so the product is
    // representable whenever it is mathematically finite.
    return std::exp(g - b * b) * erfcx(b);
  }
  // b < 0: erfc(b) in (1, 2), no cancellation; g stays small whenever the
  // enclosing formula is in its domain.
  return std::exp(g) * std::erfc(b);
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

}  // namespace brownray

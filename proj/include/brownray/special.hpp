#pragma once

// Special-function helpers shared by the closed-form distribution code.
// std::erf/std::erfc (correctly rounded to a few ulp on glibc) are the
// primitives; this header adds the scaled complement and the overflow-safe
// exp*erfc product that the queue formulas need in their far tails.

namespace brownray {

// Scaled complementary error function: exp(x^2) * erfc(x).
// Relative error is a few 1e-15 over the real line (exp*erfc below x=12,
// asymptotic series above, reflection for x<0).
double erfcx(double x);

// exp(g) * erfc(b) without intermediate overflow/underflow.
//
// The closed-form queue distributions contain products e^G erf(B) where G
// can exceed 700 while the product stays in [0,2]. For b >= 0 the product
// is computed as exp(g - b^2) * erfcx(b); g == 0 short-circuits to erfc(b)
// exactly so that boundary cancellations (q = 0) are bitwise.
double exp_mul_erfc(double g, double b);

// Standard normal CDF / PDF.
double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace brownray

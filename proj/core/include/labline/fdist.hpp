// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace labline::fdist {

// Degrees of freedom of an F distribution. Any positive reals are accepted;
// the analysis code only ever passes integer values.
struct FParams {
    double d1;
    double d2;

    FParams(double numerator_df, double denominator_df);  // throws std::invalid_argument
};

// P(F <= x). Evaluated through the regularized incomplete beta function
// I_t(d1/2, d2/2) with t = d1*x / (d1*x + d2); x <= 0 yields 0.
double f_cdf(double x, const FParams& p);

// P(F > x), computed on the complementary incomplete beta branch so that
// values near 0 keep full relative precision; x <= 0 yields 1.
double f_sf(double x, const FParams& p);

// Density of the F distribution; x <= 0 yields 0.
double f_pdf(double x, const FParams& p);

// Inverse of f_cdf on (0, 1): bracketed bisection with Newton refinement.
// Throws std::domain_error for q outside (0, 1).
double f_quantile(double q, const FParams& p);

}  // namespace labline::fdist

#pragma once

#include <cstddef>

namespace mccqr {

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Inverse standard normal CDF: Acklam's rational approximation refined with
// one Halley step, absolute error well below 1e-9. Requires 0 < p < 1.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), evaluated by Lentz's continued
// fraction with the symmetry switch at x = (a+1)/(a+b+2).
double regularized_incomplete_beta(double a, double b, double x);

// P[F(df1, df2) >= f].
double f_survival(double f, double df1, double df2);

// Two-sided p-value for a t statistic with df degrees of freedom.
double t_two_sided_p(double t, double df);

}  // namespace mccqr

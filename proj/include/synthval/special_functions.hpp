#pragma once

namespace synthval {

// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees of
// freedom: 1 - CDF(x) = Q(dof / 2, x / 2).
double chi_square_sf(double x, int dof);

// Standard normal CDF and its inverse (inverse accurate to ~1e-15 after one
// Halley refinement of Acklam's rational approximation).
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace synthval

#pragma once

namespace gtvseg::stats {

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double normal_cdf(double z);
double normal_sf(double z);
double student_t_cdf(double t, double df);
/// Inverse of student_t_cdf by bracketing and bisection.
double student_t_quantile(double p, double df);
/// Upper tail of the chi-square distribution.
double chi2_sf(double x, double df);

}  // namespace gtvseg::stats

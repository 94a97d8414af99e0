#pragma once

namespace dsi::dist {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1],
/// evaluated by Lentz's continued fraction.
double incomplete_beta(double x, double a, double b);

/// Inverse of incomplete_beta in x.
double incomplete_beta_inverse(double p, double a, double b);

double f_cdf(double f, double df1, double df2);
/// Upper tail P(F > f).
double f_sf(double f, double df1, double df2);
/// The f with upper-tail probability `alpha`.
double f_critical(double alpha, double df1, double df2);

double t_cdf(double t, double df);
/// P(|T| > |t|).
double t_two_sided_p(double t, double df);
/// Quantile of Student's t: the t with t_cdf(t, df) == p.
double t_quantile(double p, double df);

/// Upper tail of chi-square with two degrees of freedom.
double chi2_2_sf(double x);

}  // namespace dsi::dist

#pragma once

namespace progbayes {

/// CDF of the standard normal distribution. Absolute error below 1e-12.
/// Throws std::domain_error on non-finite input.
double normal_cdf(double x);

/// Inverse of normal_cdf on (0, 1). Rational approximation refined by Halley
/// steps; round-trips through normal_cdf to better than 1e-10.
double normal_quantile(double q);

/// CDF of Student's t distribution with df degrees of freedom (df > 0, not
/// necessarily an integer). Computed through the regularized incomplete beta
/// function.
double student_t_cdf(double x, double df);

/// Inverse of student_t_cdf in x for fixed df. Round-trips to 1e-8.
double student_t_quantile(double q, double df);

/// Quantile of the chi-squared distribution with df degrees of freedom,
/// computed by inverting the regularized lower incomplete gamma function.
/// Relative accuracy better than 1e-8.
double chisq_quantile(double q, double df);

namespace detail {

/// Regularized incomplete beta function I_x(a, b), continued-fraction form.
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma function P(a, x), series for x < a+1,
/// continued fraction otherwise.
double incomplete_gamma_p(double a, double x);

/// Density of Student's t at x with df degrees of freedom.
double student_t_pdf(double x, double df);

/// Density of chi-squared at x with df degrees of freedom.
double chisq_pdf(double x, double df);

}  // namespace detail

}  // namespace progbayes

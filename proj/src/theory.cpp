#include "progbayes/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "progbayes/special_functions.hpp"

namespace progbayes {

namespace {

double two_sided_rate(double threshold, double shift) {
    return normal_cdf(threshold + shift) + normal_cdf(threshold - shift);
}

void check_point(const OperatingPoint& pt) { pt.validate(); }

// Generic bisection for a rate that is even and strictly increasing in |x|
// above the baseline alpha.
double invert_increasing(double target, double alpha, double (*rate)(double, const OperatingPoint&),
                         const OperatingPoint& point) {
    if (!(target > alpha && target < 1.0))
        throw std::domain_error("target rate must lie strictly between alpha and 1");
    double lo = 0.0, hi = 1.0;
    while (rate(hi, point) < target && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (rate(mid, point) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

double prog_rate_at_beta1(double beta1, const OperatingPoint& point) {
    OperatingPoint pt = point;
    pt.beta1 = beta1;
    return prog_adjust_power(pt);
}

double single_rate_at_beta0(double beta0, const OperatingPoint& point) {
    OperatingPoint pt = point;
    pt.beta0 = beta0;
    pt.beta1 = 0.0;
    return single_arm_power(pt);
}

}  // namespace

OperatingPoint OperatingPoint::with_n_lambda_sq(double a) const {
    if (!(a > 0.0)) throw std::domain_error("n*lambda^2 must be positive");
    OperatingPoint pt = *this;
    pt.lambda = std::sqrt(a / n);
    return pt;
}

void OperatingPoint::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::domain_error("OperatingPoint: sigma must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("OperatingPoint: p must lie in (0, 1)");
    if (!(n >= 1.0) || !std::isfinite(n)) throw std::domain_error("OperatingPoint: n must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("OperatingPoint: lambda must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("OperatingPoint: alpha must lie in (0, 1)");
    if (!std::isfinite(beta0) || !std::isfinite(beta1) || !std::isfinite(beta2))
        throw std::domain_error("OperatingPoint: coefficients must be finite");
}

double prog_adjust_power(const OperatingPoint& point) {
    check_point(point);
    const double z = normal_quantile(point.alpha / 2.0);
    const double shift = (point.beta1 / point.sigma) * std::sqrt(point.n * point.p * (1.0 - point.p));
    return two_sided_rate(z, shift);
}

double single_arm_power(const OperatingPoint& point) {
    check_point(point);
    const double z = normal_quantile(point.alpha / 2.0);
    const double shift =
        ((point.beta1 + point.beta0) / point.sigma) * std::sqrt(point.p * point.n);
    return two_sided_rate(z, shift);
}

TheoryOutput asymptotic_rejection_rate_at(double beta0, double beta1, double sigma, double n,
                                          double p, double n_lambda_sq, double alpha) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0, 1)");
    if (!(n >= 1.0)) throw std::domain_error("n must be >= 1");
    if (!(n_lambda_sq > 0.0)) throw std::domain_error("n*lambda^2 must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");

    const double a = n_lambda_sq;
    const double q = 1.0 - p;
    const double shrink = a * q + 1.0;  // n lambda^2 (1-p) + 1

    TheoryOutput out;
    out.tau = beta1 + beta0 / shrink;
    out.v11_limit = ((a + 1.0) / (a * p * q + p)) / n;
    out.v_hat = (p + q * (a + 1.0) * (a + 1.0)) / (n * p * shrink * shrink);
    out.variance_factor = variance_factor(a, p);

    // Everything entering the normal CDF is expressed through beta/sigma
    // ratios so that the rate is exactly invariant under joint rescaling
    // of (beta0, sigma) at beta1 = 0.
    const double b0s = beta0 / sigma;
    const double inflation = 1.0 + q * b0s * b0s / shrink;
    const double ratio = (out.v11_limit / out.v_hat);
    const double z = normal_quantile(alpha / 2.0);
    const double threshold = z * std::sqrt(ratio * inflation);
    const double tau_over_sigma = beta1 / sigma + b0s / shrink;
    const double shift = tau_over_sigma / std::sqrt(out.v_hat);
    out.rejection_rate = two_sided_rate(threshold, shift);
    return out;
}

TheoryOutput asymptotic_rejection_rate(const OperatingPoint& point) {
    check_point(point);
    return asymptotic_rejection_rate_at(point.beta0, point.beta1, point.sigma, point.n, point.p,
                                        point.n_lambda_sq(), point.alpha);
}

double zero_limit_rate(const OperatingPoint& point) {
    check_point(point);
    const double b0s = point.beta0 / point.sigma;
    const double inflation = std::sqrt(1.0 + (1.0 - point.p) * b0s * b0s);
    const double z = normal_quantile(point.alpha / 2.0);
    const double shift =
        (point.beta1 / point.sigma + b0s) * std::sqrt(point.n * point.p);
    return two_sided_rate(z * inflation, shift);
}

double variance_factor(double n_lambda_sq, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0, 1)");
    if (!(n_lambda_sq >= 0.0)) throw std::domain_error("n*lambda^2 must be nonnegative");
    const double a = n_lambda_sq;
    const double q = 1.0 - p;
    const double num = p * q + q * q * (a + 1.0) * (a + 1.0);
    const double den = (a * q + 1.0) * (a * q + 1.0);
    return num / den;
}

double beta1_for_prog_power(double target, const OperatingPoint& point) {
    check_point(point);
    return invert_increasing(target, point.alpha, prog_rate_at_beta1, point);
}

double beta0_for_single_arm_type1(double target, const OperatingPoint& point) {
    check_point(point);
    return invert_increasing(target, point.alpha, single_rate_at_beta0, point);
}

}  // namespace progbayes

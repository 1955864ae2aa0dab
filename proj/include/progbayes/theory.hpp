#pragma once

namespace progbayes {

/// A point in true-parameter space at which operating characteristics are
/// evaluated. Defaults are the reference simulation point: no bias, no
/// effect, unit slope, sigma = sqrt(3) (prognostic-outcome correlation 1/2),
/// n = 1000, even allocation, n*lambda^2 = 1, alpha = 0.05.
struct OperatingPoint {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 1.0;
    double sigma = 1.7320508075688772;  // sqrt(3)
    double n = 1000.0;
    double p = 0.5;
    double lambda = 0.03162277660168379;  // sqrt(1/1000)
    double alpha = 0.05;

    double n_lambda_sq() const { return n * lambda * lambda; }

    /// Returns a copy with lambda set so that n * lambda^2 equals a.
    OperatingPoint with_n_lambda_sq(double a) const;

    /// Throws std::domain_error when sigma <= 0, p outside (0,1), n < 1 or
    /// alpha outside (0,1). lambda must be positive; beta2 is unconstrained.
    void validate() const;
};

/// Asymptotic operating characteristics at one point. All formulas are in
/// the large-n regime with a = n*lambda^2 held fixed and use the standard
/// normal CDF throughout; none depends on beta2.
struct TheoryOutput {
    double rejection_rate = 0.0;
    /// Asymptotic mean of the posterior-mean estimator:
    /// tau = beta1 + beta0 / (a(1-p) + 1).
    double tau = 0.0;
    /// Asymptotic sampling variance of the estimator divided by sigma^2:
    /// v_hat = (p + (1-p)(a+1)^2) / (n p (a(1-p)+1)^2).
    double v_hat = 0.0;
    /// Limit of the posterior V(1,1): ((a+1) / (a p(1-p) + p)) / n.
    double v11_limit = 0.0;
    /// Ratio of the estimator's sampling variance to the covariate-adjusted
    /// estimator's sigma^2/(np(1-p)); always at most 1.
    double variance_factor = 1.0;
};

/// Asymptotic power of the covariate-adjusted t-test:
/// Phi(z_{a/2} + beta1 sqrt(np(1-p))/sigma) + Phi(z_{a/2} - ...).
double prog_adjust_power(const OperatingPoint& point);

/// Asymptotic power of the single-arm analysis; noncentrality
/// (beta1 + beta0) sqrt(pn) / sigma.
double single_arm_power(const OperatingPoint& point);

/// Leading-order rejection rate of the Bayesian decision rule, together with
/// the intermediate quantities. Type I error at beta1 = 0, power otherwise.
TheoryOutput asymptotic_rejection_rate(const OperatingPoint& point);

/// Same, parameterized directly by a = n*lambda^2 (avoids reconstructing
/// lambda from n in sweep contexts).
TheoryOutput asymptotic_rejection_rate_at(double beta0, double beta1, double sigma, double n,
                                          double p, double n_lambda_sq, double alpha);

/// Rejection rate in the n*lambda^2 -> 0 limit, including the threshold
/// inflation sqrt(1 + (1-p) beta0^2 / sigma^2).
double zero_limit_rate(const OperatingPoint& point);

/// Variance scaling of the Bayesian estimator relative to covariate
/// adjustment: (p(1-p) + (1-p)^2 (a+1)^2) / (a(1-p) + 1)^2 with a = n*lambda^2.
double variance_factor(double n_lambda_sq, double p);

/// Solves prog_adjust_power(point with beta1 = x) = target for x >= 0 by
/// bisection. target must lie in (alpha, 1).
double beta1_for_prog_power(double target, const OperatingPoint& point);

/// Solves single_arm_power(beta1 = 0, beta0 = x) = target for x >= 0 by
/// bisection, i.e. the bias at which the single-arm type I error equals
/// target. target must lie in (alpha, 1).
double beta0_for_single_arm_type1(double target, const OperatingPoint& point);

}  // namespace progbayes

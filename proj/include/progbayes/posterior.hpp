#pragma once

#include <array>
#include <cstddef>

#include "progbayes/estimators.hpp"
#include "progbayes/trial_data.hpp"

namespace progbayes {

/// Prior width on the scaled model bias beta0/sigma. The prior on the
/// reparameterized coefficient vector (beta0 + p*beta1, beta1, beta2), scaled
/// by sigma, is normal with covariance that is finite only in the direction
/// that pins beta0/sigma to width lambda; the remaining directions are flat.
struct PriorSpec {
    double lambda = 1.0;
};

/// PriorSpec plus an informative normal prior on the slope beta2 with mean
/// mu2_0 and sd scale lambda2 (times sigma).
struct ExtendedPriorSpec {
    double lambda = 1.0;
    double lambda2 = 1.0;
    double mu2_0 = 0.0;
};

/// Normal-Inverse-Gamma posterior summary over the reparameterized
/// coefficients (beta0 + p*beta1, beta1, beta2):
///   sigma^2 | data       ~ Inverse-Gamma(n/2, s2/2)
///   coeffs  | sigma^2    ~ N(mu, sigma^2 V)
/// Marginally, (beta1 - mu[1]) / sqrt(V(1,1) * s2 / n) follows a t with n
/// degrees of freedom.
struct Posterior {
    std::array<double, 3> mu{};   // outcome units
    std::array<double, 9> V{};    // row-major, symmetric positive definite
    double s2 = 0.0;              // squared outcome units
    std::size_t n = 0;

    double v(int i, int j) const { return V[static_cast<std::size_t>(i) * 3 + j]; }
};

/// Outcome of the probability-of-sign decision rule: reject when the
/// posterior probability of {beta1 > 0} exits [alpha/2, 1 - alpha/2],
/// equivalently when |statistic| strictly exceeds the two-sided t threshold.
/// Equality with the threshold is a non-rejection.
struct DecisionOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    bool reject = false;
    double posterior_prob_positive = 0.5;
    bool degenerate = false;
};

/// Closed-form limiting posterior for the flat-tailed prior. V is obtained by
/// explicit 3x3 inversion of the precision matrix (prior precision + X'X,
/// with X rows (1, w_i - p, m_i - mbar) and centered outcomes y_i - mbar).
/// Throws NumericError if the precision matrix is numerically singular
/// (1-norm condition number above 1e12) or s2 is significantly negative.
Posterior compute_posterior(const TrialData& data, const PriorSpec& prior);

/// Extended posterior with the informative beta2 prior. Reduces to
/// compute_posterior as lambda2 grows large.
Posterior compute_posterior_beta2(const TrialData& data, const ExtendedPriorSpec& prior);

DecisionOutcome decide(const Posterior& posterior, double alpha);

/// Full Bayesian analysis: estimate = posterior mean of beta1, stddev = the
/// actual sd of the marginal t_n posterior, sqrt(V(1,1) * s2 / (n - 2)).
AnalysisReport bayes_analysis(const TrialData& data, const PriorSpec& prior, double alpha);

AnalysisReport bayes_beta2_analysis(const TrialData& data, const ExtendedPriorSpec& prior,
                                    double alpha);

}  // namespace progbayes

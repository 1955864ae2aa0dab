#include "progbayes/posterior.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "progbayes/errors.hpp"
#include "progbayes/special_functions.hpp"

namespace progbayes {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kInterval95Z = 1.96;

struct Mat3 {
    std::array<double, 9> a{};
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * 3 + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * 3 + j]; }
};

double det3(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// Closed-form inverse: adjugate over determinant.
Mat3 inverse3(const Mat3& m, double det) {
    Mat3 inv;
    inv(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    inv(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    inv(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    inv(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    inv(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    inv(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    inv(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    inv(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    inv(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
    return inv;
}

double norm1(const Mat3& m) {
    double best = 0.0;
    for (int j = 0; j < 3; ++j) {
        double col = 0.0;
        for (int i = 0; i < 3; ++i) col += std::fabs(m(i, j));
        best = std::max(best, col);
    }
    return best;
}

std::array<double, 3> mat_vec(const Mat3& m, const std::array<double, 3>& v) {
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[static_cast<std::size_t>(i)] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return out;
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Shared core: builds the precision matrix from the given prior block, adds
// X'X, inverts, and assembles mu and s2. prior_rhs is the prior contribution
// to the right-hand side (zero except for the informative beta2 prior);
// s2_offset is its contribution to s2.
Posterior assemble_posterior(const TrialData& data, const Mat3& prior_precision,
                             const std::array<double, 3>& prior_rhs, double s2_offset) {
    const auto y = data.y();
    const auto w = data.w();
    const auto m = data.m();
    const std::size_t n = data.n();
    const double p = data.treated_fraction();

    double mbar = 0.0;
    for (double v : m) mbar += v;
    mbar /= static_cast<double>(n);

    Mat3 precision = prior_precision;
    std::array<double, 3> xty{prior_rhs};
    double yty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = 1.0;
        const double x2 = static_cast<double>(w[i]) - p;
        const double x3 = m[i] - mbar;
        const double yc = y[i] - mbar;
        precision(0, 0) += x1 * x1;
        precision(0, 1) += x1 * x2;
        precision(0, 2) += x1 * x3;
        precision(1, 1) += x2 * x2;
        precision(1, 2) += x2 * x3;
        precision(2, 2) += x3 * x3;
        xty[0] += x1 * yc;
        xty[1] += x2 * yc;
        xty[2] += x3 * yc;
        yty += yc * yc;
    }
    precision(1, 0) = precision(0, 1);
    precision(2, 0) = precision(0, 2);
    precision(2, 1) = precision(1, 2);

    const double det = det3(precision);
    if (!std::isfinite(det) || det == 0.0)
        throw NumericError("posterior precision matrix is singular");
    const Mat3 V = inverse3(precision, det);
    const double cond = norm1(precision) * norm1(V);
    if (!std::isfinite(cond) || cond > kMaxCondition)
        throw NumericError("posterior precision matrix is numerically singular (condition " +
                           std::to_string(cond) + ")");

    Posterior post;
    post.n = n;
    post.mu = mat_vec(V, xty);
    post.V = V.a;

    double s2 = yty - dot3(post.mu, mat_vec(precision, post.mu)) + s2_offset;
    const double scale = yty + s2_offset;
    if (s2 < 0.0) {
        if (s2 >= -1e-9 * scale)
            s2 = 0.0;
        else
            throw NumericError("posterior s2 is significantly negative (" + std::to_string(s2) +
                               "); inconsistent inputs");
    }
    post.s2 = s2;
    return post;
}

Mat3 bias_prior_precision(double lambda, double p) {
    const double inv_l2 = 1.0 / (lambda * lambda);
    Mat3 prior;
    prior(0, 0) = inv_l2;
    prior(0, 1) = prior(1, 0) = -p * inv_l2;
    prior(1, 1) = p * p * inv_l2;
    return prior;
}

void check_lambda(double lambda, const char* who) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error(std::string(who) + ": lambda must be positive and finite");
}

}  // namespace

Posterior compute_posterior(const TrialData& data, const PriorSpec& prior) {
    check_lambda(prior.lambda, "compute_posterior");
    return assemble_posterior(data, bias_prior_precision(prior.lambda, data.treated_fraction()),
                              {0.0, 0.0, 0.0}, 0.0);
}

Posterior compute_posterior_beta2(const TrialData& data, const ExtendedPriorSpec& prior) {
    check_lambda(prior.lambda, "compute_posterior_beta2");
    check_lambda(prior.lambda2, "compute_posterior_beta2 (lambda2)");
    const double inv_l22 = 1.0 / (prior.lambda2 * prior.lambda2);
    Mat3 precision = bias_prior_precision(prior.lambda, data.treated_fraction());
    precision(2, 2) = inv_l22;
    const std::array<double, 3> rhs{0.0, 0.0, prior.mu2_0 * inv_l22};
    const double s2_offset = prior.mu2_0 * prior.mu2_0 * inv_l22;
    return assemble_posterior(data, precision, rhs, s2_offset);
}

DecisionOutcome decide(const Posterior& posterior, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("decide: alpha must lie in (0, 1)");
    const double df = static_cast<double>(posterior.n);
    DecisionOutcome out;
    out.threshold = student_t_quantile(1.0 - alpha / 2.0, df);
    const double mu1 = posterior.mu[1];
    const double scale2 = posterior.v(1, 1) * posterior.s2 / df;
    if (scale2 <= 0.0) {
        // Zero residual scale: infinitely concentrated posterior. A mean that
        // is zero up to round-off in the other components counts as zero.
        const double mu_scale = std::max({std::fabs(posterior.mu[0]), std::fabs(posterior.mu[1]),
                                          std::fabs(posterior.mu[2])});
        const bool is_zero = std::fabs(mu1) <= 1e-9 * mu_scale;
        out.degenerate = true;
        out.statistic = is_zero ? 0.0
                        : mu1 > 0.0 ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
        out.reject = !is_zero;
        out.posterior_prob_positive = is_zero ? 0.5 : (mu1 > 0.0 ? 1.0 : 0.0);
        return out;
    }
    out.statistic = mu1 / std::sqrt(scale2);
    out.reject = std::fabs(out.statistic) > out.threshold;
    out.posterior_prob_positive = student_t_cdf(out.statistic, df);
    return out;
}

namespace {

AnalysisReport report_from_posterior(Method method, const Posterior& post,
                                     const DecisionOutcome& decision, double alpha) {
    if (post.n <= 2)
        throw NumericError("bayes_analysis: posterior t variance requires n > 2");
    const double nn = static_cast<double>(post.n);
    AnalysisReport report;
    report.method = method;
    report.estimate = post.mu[1];
    report.stddev = std::sqrt(post.v(1, 1) * post.s2 / (nn - 2.0));
    report.interval_lo = report.estimate - kInterval95Z * report.stddev;
    report.interval_hi = report.estimate + kInterval95Z * report.stddev;
    report.statistic = decision.statistic;
    report.df = nn;
    report.reject = decision.reject;
    report.alpha = alpha;
    report.degenerate = decision.degenerate;
    return report;
}

}  // namespace

AnalysisReport bayes_analysis(const TrialData& data, const PriorSpec& prior, double alpha) {
    const auto post = compute_posterior(data, prior);
    const auto decision = decide(post, alpha);
    return report_from_posterior(Method::bayes, post, decision, alpha);
}

AnalysisReport bayes_beta2_analysis(const TrialData& data, const ExtendedPriorSpec& prior,
                                    double alpha) {
    const auto post = compute_posterior_beta2(data, prior);
    const auto decision = decide(post, alpha);
    return report_from_posterior(Method::bayes_beta2, post, decision, alpha);
}

}  // namespace progbayes

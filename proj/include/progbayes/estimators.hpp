#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "progbayes/trial_data.hpp"

namespace progbayes {

enum class Method { unadjusted, prog_adjust, single_arm, bayes, bayes_beta2 };

std::string_view method_name(Method method);
Method method_from_name(std::string_view name);

/// One analysis of one trial. interval_lo/hi = estimate -/+ 1.96 * stddev.
/// reject holds iff |statistic| exceeds the two-sided t threshold at level
/// alpha with the stated df, except in degenerate zero-variance fits, where
/// the statistic is reported as 0 or +/-infinity and reject = (estimate != 0).
struct AnalysisReport {
    Method method = Method::unadjusted;
    double estimate = 0.0;
    double stddev = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    double statistic = 0.0;
    double df = 0.0;
    bool reject = false;
    double alpha = 0.05;
    bool degenerate = false;
};

/// Ordinary least squares of response on the given regressor columns.
/// cov_scale is (X'X)^-1 stored row-major (k x k); the coefficient covariance
/// is (rss / df) * cov_scale. Throws NumericError on rank deficiency.
struct OlsFit {
    std::vector<double> coef;
    std::vector<double> cov_scale;
    double rss = 0.0;
    double df = 0.0;
    std::size_t k = 0;
};

OlsFit ols_fit(const std::vector<std::vector<double>>& columns, std::span<const double> response);

/// Two-sided t-test of the treatment coefficient in a regression of y on an
/// intercept and w only. Prognostic scores are ignored.
AnalysisReport unadjusted_analysis(const TrialData& data, double alpha);

/// Two-sided t-test of the treatment coefficient in a regression of y on an
/// intercept, w, and the prognostic score m.
AnalysisReport prog_adjust_analysis(const TrialData& data, double alpha);

/// One-sample t-test of (y - m) on the treated arm only; control rows are
/// ignored entirely. The variance of (y - m) uses divisor pn (maximum
/// likelihood), so the statistic (ybar_t - mbar_t) / (S_t / sqrt(pn - 1))
/// equals the standard one-sample t statistic.
AnalysisReport single_arm_analysis(const TrialData& data, double alpha);

namespace detail {
/// Assembles a report from an estimate, its standard error and the test df,
/// applying the shared degenerate-fit convention: a zero-variance fit rejects
/// iff the estimate is nonzero, where "zero" means at most 1e-9 times
/// zero_scale (a magnitude representative of the fitted quantities, shielding
/// the flag from round-off in exact fits).
AnalysisReport make_report(Method method, double estimate, double se, double df, double alpha,
                           double zero_scale);
}  // namespace detail

}  // namespace progbayes

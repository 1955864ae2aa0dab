#pragma once

#include <string>
#include <vector>

#include "progbayes/trial_data.hpp"

namespace progbayes {

/// Diagnostics for one historical study in study-level elicitation. beta0_hat
/// and sigma_hat use divisor-N_j (maximum likelihood) definitions; e is their
/// ratio.
struct StudyDiagnostic {
    std::string study_id;
    std::size_t n_subjects = 0;
    double beta0_hat = 0.0;
    double sigma_hat = 0.0;
    double e = 0.0;
};

/// Result of fitting the prior width lambda from historical data, with the
/// intermediate quantities that define it.
struct PriorEstimate {
    enum class Mode { subject, study };

    double lambda = 0.0;
    Mode mode = Mode::subject;

    // Subject mode: pooled residual diagnostics over all N historical rows.
    std::size_t n_subjects = 0;
    double beta0_hat = 0.0;
    double sigma_hat = 0.0;
    double e_all = 0.0;
    double floor = 0.0;  // floor_coefficient / sqrt(N)

    // Study mode: per-study ratios and the chi-squared divisor.
    std::vector<StudyDiagnostic> studies;
    double chisq_lower = 0.0;  // quantile of chi^2_m at 0.025
};

/// Pools all historical subjects: beta0_hat = mean(y - m), sigma_hat^2 the
/// divisor-N variance of the residuals, e_all their ratio, and
/// lambda = max(floor_coefficient / sqrt(N), |e_all|).
/// Throws NumericError when the pooled residual variance is zero.
PriorEstimate subject_level_lambda(const HistoricalSubjects& hist,
                                   double floor_coefficient = 3.0);

/// Per-study ratios e_j = beta0_hat_j / sigma_hat_j, modeled as draws from a
/// mean-zero normal; lambda^2 is the upper end of the 95% maximum-likelihood
/// confidence interval for that normal's variance:
///   lambda = sqrt(sum_j e_j^2 / chisq_quantile(0.025, m)).
/// Throws NumericError when any study has zero residual variance (naming the
/// study) or when every e_j is zero (lambda would be 0, which no valid
/// PriorSpec accepts; use the subject-level floor instead).
PriorEstimate study_level_lambda(const HistoricalSubjects& hist);

}  // namespace progbayes

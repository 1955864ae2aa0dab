#include "progbayes/prior_elicitation.hpp"

#include <cmath>
#include <stdexcept>

#include "progbayes/errors.hpp"
#include "progbayes/special_functions.hpp"

namespace progbayes {

namespace {

// Mean and divisor-N standard deviation of the residuals y - m.
struct ResidualStats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

ResidualStats residual_stats(const std::vector<double>& y, const std::vector<double>& m) {
    ResidualStats stats;
    stats.n = y.size();
    for (std::size_t i = 0; i < y.size(); ++i) stats.mean += y[i] - m[i];
    stats.mean /= static_cast<double>(stats.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - m[i] - stats.mean;
        ss += d * d;
    }
    stats.sd = std::sqrt(ss / static_cast<double>(stats.n));
    return stats;
}

}  // namespace

PriorEstimate subject_level_lambda(const HistoricalSubjects& hist, double floor_coefficient) {
    if (!(floor_coefficient > 0.0))
        throw std::domain_error("subject_level_lambda: floor coefficient must be positive");

    std::vector<double> y, m;
    y.reserve(hist.total_subjects());
    m.reserve(hist.total_subjects());
    for (const auto& study : hist.studies()) {
        y.insert(y.end(), study.y.begin(), study.y.end());
        m.insert(m.end(), study.m.begin(), study.m.end());
    }
    const auto stats = residual_stats(y, m);
    if (stats.sd == 0.0)
        throw NumericError("subject_level_lambda: pooled residuals have zero variance");

    PriorEstimate est;
    est.mode = PriorEstimate::Mode::subject;
    est.n_subjects = stats.n;
    est.beta0_hat = stats.mean;
    est.sigma_hat = stats.sd;
    est.e_all = stats.mean / stats.sd;
    est.floor = floor_coefficient / std::sqrt(static_cast<double>(stats.n));
    est.lambda = std::max(est.floor, std::fabs(est.e_all));
    return est;
}

PriorEstimate study_level_lambda(const HistoricalSubjects& hist) {
    PriorEstimate est;
    est.mode = PriorEstimate::Mode::study;

    double sum_e2 = 0.0;
    for (const auto& study : hist.studies()) {
        const auto stats = residual_stats(study.y, study.m);
        if (stats.sd == 0.0)
            throw NumericError("study_level_lambda: study '" + study.id +
                               "' has zero residual variance");
        StudyDiagnostic diag;
        diag.study_id = study.id;
        diag.n_subjects = stats.n;
        diag.beta0_hat = stats.mean;
        diag.sigma_hat = stats.sd;
        diag.e = stats.mean / stats.sd;
        sum_e2 += diag.e * diag.e;
        est.studies.push_back(std::move(diag));
    }
    if (sum_e2 == 0.0)
        throw NumericError(
            "study_level_lambda: every per-study bias ratio is zero, so the fitted lambda "
            "would be 0, which is not a usable prior width; fit a subject-level prior (its "
            "floor keeps lambda positive) instead");

    const double m = static_cast<double>(hist.study_count());
    est.chisq_lower = chisq_quantile(0.025, m);
    est.lambda = std::sqrt(sum_e2 / est.chisq_lower);
    est.n_subjects = hist.total_subjects();
    return est;
}

}  // namespace progbayes

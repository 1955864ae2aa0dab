#include "progbayes/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "progbayes/errors.hpp"
#include "progbayes/special_functions.hpp"

namespace progbayes {

namespace {
constexpr double kInterval95Z = 1.96;
}

std::string_view method_name(Method method) {
    switch (method) {
        case Method::unadjusted: return "unadjusted";
        case Method::prog_adjust: return "prog_adjust";
        case Method::single_arm: return "single_arm";
        case Method::bayes: return "bayes";
        case Method::bayes_beta2: return "bayes_beta2";
    }
    return "unknown";
}

Method method_from_name(std::string_view name) {
    if (name == "unadjusted") return Method::unadjusted;
    if (name == "prog_adjust") return Method::prog_adjust;
    if (name == "single_arm") return Method::single_arm;
    if (name == "bayes") return Method::bayes;
    if (name == "bayes_beta2") return Method::bayes_beta2;
    throw std::invalid_argument("unknown method name: " + std::string(name));
}

OlsFit ols_fit(const std::vector<std::vector<double>>& columns,
               std::span<const double> response) {
    const std::size_t k = columns.size();
    const std::size_t n = response.size();
    if (k == 0) throw NumericError("ols_fit: no regressor columns");
    for (const auto& col : columns)
        if (col.size() != n) throw NumericError("ols_fit: column length mismatch");
    if (n <= k)
        throw NumericError("ols_fit: need more observations than regressors (n=" +
                           std::to_string(n) + ", k=" + std::to_string(k) + ")");

    // Normal equations G = X'X, b = X'y.
    std::vector<double> G(k * k, 0.0), b(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * columns[j][r];
            G[i * k + j] = G[j * k + i] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += columns[i][r] * response[r];
        b[i] = s;
    }

    // Cholesky factorization G = L L'. A non-positive pivot relative to the
    // diagonal scale signals rank deficiency.
    double max_diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) max_diag = std::max(max_diag, G[i * k + i]);
    std::vector<double> L(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = G[i * k + j];
            for (std::size_t t = 0; t < j; ++t) s -= L[i * k + t] * L[j * k + t];
            if (i == j) {
                if (s <= 1e-12 * max_diag)
                    throw NumericError("ols_fit: singular design matrix");
                L[i * k + i] = std::sqrt(s);
            } else {
                L[i * k + j] = s / L[j * k + j];
            }
        }
    }

    auto solve = [&](std::vector<double> rhs) {
        // L z = rhs, then L' x = z.
        for (std::size_t i = 0; i < k; ++i) {
            double s = rhs[i];
            for (std::size_t t = 0; t < i; ++t) s -= L[i * k + t] * rhs[t];
            rhs[i] = s / L[i * k + i];
        }
        for (std::size_t ii = k; ii-- > 0;) {
            double s = rhs[ii];
            for (std::size_t t = ii + 1; t < k; ++t) s -= L[t * k + ii] * rhs[t];
            rhs[ii] = s / L[ii * k + ii];
        }
        return rhs;
    };

    OlsFit fit;
    fit.k = k;
    fit.coef = solve(b);
    fit.cov_scale.assign(k * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> e(k, 0.0);
        e[j] = 1.0;
        const auto col = solve(std::move(e));
        for (std::size_t i = 0; i < k; ++i) fit.cov_scale[i * k + j] = col[i];
    }

    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fitted = 0.0;
        for (std::size_t i = 0; i < k; ++i) fitted += fit.coef[i] * columns[i][r];
        const double resid = response[r] - fitted;
        rss += resid * resid;
    }
    fit.rss = rss;
    fit.df = static_cast<double>(n - k);
    return fit;
}

namespace detail {

AnalysisReport make_report(Method method, double estimate, double se, double df, double alpha,
                           double zero_scale) {
    AnalysisReport report;
    report.method = method;
    report.estimate = estimate;
    report.stddev = se;
    report.interval_lo = estimate - kInterval95Z * se;
    report.interval_hi = estimate + kInterval95Z * se;
    report.df = df;
    report.alpha = alpha;
    if (se == 0.0) {
        report.degenerate = true;
        const bool is_zero = std::fabs(estimate) <= 1e-9 * zero_scale;
        report.statistic = is_zero ? 0.0
                           : estimate > 0.0
                               ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
        report.reject = !is_zero;
        return report;
    }
    report.statistic = estimate / se;
    const double threshold = student_t_quantile(1.0 - alpha / 2.0, df);
    report.reject = std::fabs(report.statistic) > threshold;
    return report;
}

}  // namespace detail

AnalysisReport unadjusted_analysis(const TrialData& data, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("unadjusted_analysis: alpha must lie in (0, 1)");
    const std::size_t n = data.n();
    std::vector<double> ones(n, 1.0), w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = data.w()[i];
    const auto fit = ols_fit({ones, w}, data.y());
    const double sigma2 = fit.rss / fit.df;
    const double se = std::sqrt(sigma2 * fit.cov_scale[1 * 2 + 1]);
    const double scale = std::max(std::fabs(fit.coef[0]), std::fabs(fit.coef[1]));
    return detail::make_report(Method::unadjusted, fit.coef[1], se, fit.df, alpha, scale);
}

AnalysisReport prog_adjust_analysis(const TrialData& data, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("prog_adjust_analysis: alpha must lie in (0, 1)");
    const std::size_t n = data.n();
    std::vector<double> ones(n, 1.0), w(n), m(data.m().begin(), data.m().end());
    for (std::size_t i = 0; i < n; ++i) w[i] = data.w()[i];
    const auto fit = ols_fit({ones, w, m}, data.y());
    const double sigma2 = fit.rss / fit.df;
    const double se = std::sqrt(sigma2 * fit.cov_scale[1 * 3 + 1]);
    const double scale = std::max({std::fabs(fit.coef[0]), std::fabs(fit.coef[1]),
                                   std::fabs(fit.coef[2])});
    return detail::make_report(Method::prog_adjust, fit.coef[1], se, fit.df, alpha, scale);
}

AnalysisReport single_arm_analysis(const TrialData& data, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("single_arm_analysis: alpha must lie in (0, 1)");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (data.w()[i] == 1) diffs.push_back(data.y()[i] - data.m()[i]);
    const std::size_t pn = diffs.size();
    if (pn < 2) throw NumericError("single_arm_analysis: need at least 2 treated subjects");

    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(pn);
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const double s2_ml = ss / static_cast<double>(pn);  // divisor pn
    const double df = static_cast<double>(pn - 1);
    const double se = std::sqrt(s2_ml / df);  // = S_t / sqrt(pn - 1)
    double scale = 0.0;
    for (double d : diffs) scale = std::max(scale, std::fabs(d));
    return detail::make_report(Method::single_arm, mean, se, df, alpha, scale);
}

}  // namespace progbayes

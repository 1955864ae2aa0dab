#include "progbayes/json_io.hpp"

#include <cmath>

#include "progbayes/errors.hpp"

namespace progbayes {

using nlohmann::json;

namespace {
// JSON has no infinity literal; degenerate statistics serialize as strings.
json finite_or_string(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}
}  // namespace

json report_to_json(const AnalysisReport& report) {
    return json{{"method", std::string(method_name(report.method))},
                {"estimate", report.estimate},
                {"stddev", report.stddev},
                {"interval_95", json::array({report.interval_lo, report.interval_hi})},
                {"statistic", finite_or_string(report.statistic)},
                {"df", report.df},
                {"reject", report.reject},
                {"alpha", report.alpha},
                {"degenerate", report.degenerate}};
}

json prior_estimate_to_json(const PriorEstimate& estimate) {
    json j{{"lambda", estimate.lambda},
           {"mode", estimate.mode == PriorEstimate::Mode::subject ? "subject" : "study"},
           {"n_subjects", estimate.n_subjects}};
    if (estimate.mode == PriorEstimate::Mode::subject) {
        j["beta0_hat"] = estimate.beta0_hat;
        j["sigma_hat"] = estimate.sigma_hat;
        j["e_all"] = estimate.e_all;
        j["floor"] = estimate.floor;
    } else {
        j["chisq_lower"] = estimate.chisq_lower;
        json studies = json::array();
        for (const auto& s : estimate.studies)
            studies.push_back(json{{"study_id", s.study_id},
                                   {"n_subjects", s.n_subjects},
                                   {"beta0_hat", s.beta0_hat},
                                   {"sigma_hat", s.sigma_hat},
                                   {"e", s.e}});
        j["studies"] = std::move(studies);
    }
    return j;
}

PriorEstimate prior_estimate_from_json(const json& j) {
    PriorEstimate est;
    if (!j.contains("lambda"))
        throw LoadError("prior estimate JSON is missing the 'lambda' field");
    est.lambda = j.at("lambda").get<double>();
    if (!(est.lambda > 0.0) || !std::isfinite(est.lambda))
        throw LoadError("prior estimate JSON: lambda must be positive and finite");
    if (j.contains("mode"))
        est.mode = j.at("mode").get<std::string>() == "study" ? PriorEstimate::Mode::study
                                                              : PriorEstimate::Mode::subject;
    if (j.contains("n_subjects")) est.n_subjects = j.at("n_subjects").get<std::size_t>();
    if (j.contains("beta0_hat")) est.beta0_hat = j.at("beta0_hat").get<double>();
    if (j.contains("sigma_hat")) est.sigma_hat = j.at("sigma_hat").get<double>();
    if (j.contains("e_all")) est.e_all = j.at("e_all").get<double>();
    if (j.contains("floor")) est.floor = j.at("floor").get<double>();
    if (j.contains("chisq_lower")) est.chisq_lower = j.at("chisq_lower").get<double>();
    return est;
}

json theory_row_to_json(const OperatingPoint& point, const TheoryOutput& output) {
    return json{{"beta0", point.beta0},
                {"beta1", point.beta1},
                {"beta2", point.beta2},
                {"sigma", point.sigma},
                {"n", point.n},
                {"p", point.p},
                {"lambda", point.lambda},
                {"n_lambda_sq", point.n_lambda_sq()},
                {"alpha", point.alpha},
                {"rejection_rate", output.rejection_rate},
                {"tau", output.tau},
                {"v_hat", output.v_hat},
                {"v11_limit", output.v11_limit},
                {"variance_factor", output.variance_factor}};
}

}  // namespace progbayes

// Python bindings for the main operations: special functions, trial data,
// the five analyses, prior elicitation, the asymptotic formulas, and the
// Monte Carlo harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "progbayes/estimators.hpp"
#include "progbayes/posterior.hpp"
#include "progbayes/prior_elicitation.hpp"
#include "progbayes/random_stream.hpp"
#include "progbayes/simulator.hpp"
#include "progbayes/special_functions.hpp"
#include "progbayes/theory.hpp"
#include "progbayes/trial_data.hpp"

namespace py = pybind11;
using namespace progbayes;

namespace {

py::dict report_to_dict(const AnalysisReport& r) {
    py::dict d;
    d["method"] = std::string(method_name(r.method));
    d["estimate"] = r.estimate;
    d["stddev"] = r.stddev;
    d["interval_95"] = py::make_tuple(r.interval_lo, r.interval_hi);
    d["statistic"] = r.statistic;
    d["df"] = r.df;
    d["reject"] = r.reject;
    d["alpha"] = r.alpha;
    d["degenerate"] = r.degenerate;
    return d;
}

py::dict prior_estimate_to_dict(const PriorEstimate& e) {
    py::dict d;
    d["lambda"] = e.lambda;
    d["mode"] = e.mode == PriorEstimate::Mode::subject ? "subject" : "study";
    d["n_subjects"] = e.n_subjects;
    if (e.mode == PriorEstimate::Mode::subject) {
        d["beta0_hat"] = e.beta0_hat;
        d["sigma_hat"] = e.sigma_hat;
        d["e_all"] = e.e_all;
        d["floor"] = e.floor;
    } else {
        d["chisq_lower"] = e.chisq_lower;
        py::list studies;
        for (const auto& s : e.studies) {
            py::dict sd;
            sd["study_id"] = s.study_id;
            sd["n_subjects"] = s.n_subjects;
            sd["beta0_hat"] = s.beta0_hat;
            sd["sigma_hat"] = s.sigma_hat;
            sd["e"] = s.e;
            studies.append(sd);
        }
        d["studies"] = studies;
    }
    return d;
}

OperatingPoint point_from_kwargs(double beta0, double beta1, double beta2, double sigma,
                                 double n, double p, double lambda, double alpha) {
    OperatingPoint pt;
    pt.beta0 = beta0;
    pt.beta1 = beta1;
    pt.beta2 = beta2;
    pt.sigma = sigma;
    pt.n = n;
    pt.p = p;
    pt.lambda = lambda;
    pt.alpha = alpha;
    return pt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian prognostic covariate adjustment: posteriors, comparator analyses, "
              "prior elicitation, asymptotic operating characteristics, and a seeded "
              "Monte Carlo harness.";

    // Special functions.
    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("normal_quantile", &normal_quantile, py::arg("q"));
    m.def("student_t_cdf", &student_t_cdf, py::arg("x"), py::arg("df"));
    m.def("student_t_quantile", &student_t_quantile, py::arg("q"), py::arg("df"));
    m.def("chisq_quantile", &chisq_quantile, py::arg("q"), py::arg("df"));

    // Random streams.
    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream_index") = 0)
        .def_property_readonly("seed", &RandomStream::seed)
        .def_property_readonly("stream_index", &RandomStream::stream_index)
        .def_property_readonly("position", &RandomStream::position)
        .def("next_uniform", &RandomStream::next_uniform)
        .def("next_normal", &RandomStream::next_normal);

    // Trial data.
    py::class_<TrialData>(m, "TrialData")
        .def_static(
            "from_columns",
            [](std::vector<double> y, std::vector<int> w, std::vector<double> m) {
                return TrialData::from_columns(std::move(y), std::move(w), std::move(m));
            },
            py::arg("y"), py::arg("w"), py::arg("m"))
        .def_property_readonly("n", &TrialData::n)
        .def_property_readonly("treated_count", &TrialData::treated_count)
        .def_property_readonly("treated_fraction", &TrialData::treated_fraction)
        .def_property_readonly(
            "y", [](const TrialData& t) { return std::vector<double>(t.y().begin(), t.y().end()); })
        .def_property_readonly(
            "w", [](const TrialData& t) { return std::vector<int>(t.w().begin(), t.w().end()); })
        .def_property_readonly("m", [](const TrialData& t) {
            return std::vector<double>(t.m().begin(), t.m().end());
        });

    m.def("load_trial_csv",
          [](const std::string& path) { return load_trial_csv(path); }, py::arg("path"));
    m.def("summarize", [](const TrialData& data) {
        const auto s = summarize(data);
        py::dict d;
        d["ybar_control"] = s.ybar_control;
        d["ybar_treated"] = s.ybar_treated;
        d["mbar_control"] = s.mbar_control;
        d["mbar_treated"] = s.mbar_treated;
        d["mbar"] = s.mbar;
        d["s2_m"] = s.s2_m;
        d["n_control"] = s.n_control;
        d["n_treated"] = s.n_treated;
        return d;
    });

    // Analyses.
    m.def(
        "unadjusted_analysis",
        [](const TrialData& d, double alpha) { return report_to_dict(unadjusted_analysis(d, alpha)); },
        py::arg("data"), py::arg("alpha") = 0.05);
    m.def(
        "prog_adjust_analysis",
        [](const TrialData& d, double alpha) {
            return report_to_dict(prog_adjust_analysis(d, alpha));
        },
        py::arg("data"), py::arg("alpha") = 0.05);
    m.def(
        "single_arm_analysis",
        [](const TrialData& d, double alpha) {
            return report_to_dict(single_arm_analysis(d, alpha));
        },
        py::arg("data"), py::arg("alpha") = 0.05);
    m.def(
        "bayes_analysis",
        [](const TrialData& d, double lambda, double alpha) {
            return report_to_dict(bayes_analysis(d, PriorSpec{lambda}, alpha));
        },
        py::arg("data"), py::arg("lam"), py::arg("alpha") = 0.05);
    m.def(
        "bayes_beta2_analysis",
        [](const TrialData& d, double lambda, double lambda2, double mu2_0, double alpha) {
            return report_to_dict(
                bayes_beta2_analysis(d, ExtendedPriorSpec{lambda, lambda2, mu2_0}, alpha));
        },
        py::arg("data"), py::arg("lam"), py::arg("lambda2"), py::arg("mu2_0") = 0.0,
        py::arg("alpha") = 0.05);

    // Posterior.
    py::class_<Posterior>(m, "Posterior")
        .def_property_readonly("mu",
                               [](const Posterior& p) {
                                   return py::make_tuple(p.mu[0], p.mu[1], p.mu[2]);
                               })
        .def("v", &Posterior::v, py::arg("i"), py::arg("j"))
        .def_property_readonly("s2", [](const Posterior& p) { return p.s2; })
        .def_property_readonly("n", [](const Posterior& p) { return p.n; });

    m.def(
        "compute_posterior",
        [](const TrialData& d, double lambda) { return compute_posterior(d, PriorSpec{lambda}); },
        py::arg("data"), py::arg("lam"));
    m.def(
        "compute_posterior_beta2",
        [](const TrialData& d, double lambda, double lambda2, double mu2_0) {
            return compute_posterior_beta2(d, ExtendedPriorSpec{lambda, lambda2, mu2_0});
        },
        py::arg("data"), py::arg("lam"), py::arg("lambda2"), py::arg("mu2_0") = 0.0);
    m.def(
        "decide",
        [](const Posterior& post, double alpha) {
            const auto out = decide(post, alpha);
            py::dict d;
            d["statistic"] = out.statistic;
            d["threshold"] = out.threshold;
            d["reject"] = out.reject;
            d["posterior_prob_positive"] = out.posterior_prob_positive;
            d["degenerate"] = out.degenerate;
            return d;
        },
        py::arg("posterior"), py::arg("alpha") = 0.05);

    // Prior elicitation from flat arrays.
    m.def(
        "subject_level_lambda",
        [](const std::vector<std::string>& study_ids, const std::vector<double>& y,
           const std::vector<double>& m, double floor_coefficient) {
            return prior_estimate_to_dict(
                subject_level_lambda(HistoricalSubjects::from_rows(study_ids, y, m),
                                     floor_coefficient));
        },
        py::arg("study_ids"), py::arg("y"), py::arg("m"), py::arg("floor_coefficient") = 3.0);
    m.def(
        "study_level_lambda",
        [](const std::vector<std::string>& study_ids, const std::vector<double>& y,
           const std::vector<double>& m) {
            return prior_estimate_to_dict(
                study_level_lambda(HistoricalSubjects::from_rows(study_ids, y, m)));
        },
        py::arg("study_ids"), py::arg("y"), py::arg("m"));

    // Theory.
    const auto point_args = [](auto f) { return f; };
    (void)point_args;
    m.def(
        "prog_adjust_power",
        [](double beta0, double beta1, double beta2, double sigma, double n, double p,
           double lambda, double alpha) {
            return prog_adjust_power(
                point_from_kwargs(beta0, beta1, beta2, sigma, n, p, lambda, alpha));
        },
        py::arg("beta0") = 0.0, py::arg("beta1") = 0.0, py::arg("beta2") = 1.0,
        py::arg("sigma") = 1.7320508075688772, py::arg("n") = 1000.0, py::arg("p") = 0.5,
        py::arg("lam") = 0.03162277660168379, py::arg("alpha") = 0.05);
    m.def(
        "single_arm_power",
        [](double beta0, double beta1, double beta2, double sigma, double n, double p,
           double lambda, double alpha) {
            return single_arm_power(
                point_from_kwargs(beta0, beta1, beta2, sigma, n, p, lambda, alpha));
        },
        py::arg("beta0") = 0.0, py::arg("beta1") = 0.0, py::arg("beta2") = 1.0,
        py::arg("sigma") = 1.7320508075688772, py::arg("n") = 1000.0, py::arg("p") = 0.5,
        py::arg("lam") = 0.03162277660168379, py::arg("alpha") = 0.05);
    m.def(
        "asymptotic_rejection_rate",
        [](double beta0, double beta1, double beta2, double sigma, double n, double p,
           double lambda, double alpha) {
            const auto out = asymptotic_rejection_rate(
                point_from_kwargs(beta0, beta1, beta2, sigma, n, p, lambda, alpha));
            py::dict d;
            d["rejection_rate"] = out.rejection_rate;
            d["tau"] = out.tau;
            d["v_hat"] = out.v_hat;
            d["v11_limit"] = out.v11_limit;
            d["variance_factor"] = out.variance_factor;
            return d;
        },
        py::arg("beta0") = 0.0, py::arg("beta1") = 0.0, py::arg("beta2") = 1.0,
        py::arg("sigma") = 1.7320508075688772, py::arg("n") = 1000.0, py::arg("p") = 0.5,
        py::arg("lam") = 0.03162277660168379, py::arg("alpha") = 0.05);
    m.def(
        "zero_limit_rate",
        [](double beta0, double beta1, double beta2, double sigma, double n, double p,
           double lambda, double alpha) {
            return zero_limit_rate(
                point_from_kwargs(beta0, beta1, beta2, sigma, n, p, lambda, alpha));
        },
        py::arg("beta0") = 0.0, py::arg("beta1") = 0.0, py::arg("beta2") = 1.0,
        py::arg("sigma") = 1.7320508075688772, py::arg("n") = 1000.0, py::arg("p") = 0.5,
        py::arg("lam") = 0.03162277660168379, py::arg("alpha") = 0.05);
    m.def("variance_factor", &variance_factor, py::arg("n_lambda_sq"), py::arg("p"));

    // Simulator.
    m.def(
        "generate_trial",
        [](const std::string& model, double beta0, double beta1, double beta2, double sigma,
           double n, double p, std::uint64_t seed, std::uint64_t stream_index) {
            OperatingPoint pt;
            pt.beta0 = beta0;
            pt.beta1 = beta1;
            pt.beta2 = beta2;
            pt.sigma = sigma;
            pt.n = n;
            pt.p = p;
            RandomStream stream(seed, stream_index);
            return generate_trial(GenerativeSpec{generative_model_from_name(model), pt}, stream);
        },
        py::arg("model"), py::arg("beta0"), py::arg("beta1"), py::arg("beta2"), py::arg("sigma"),
        py::arg("n"), py::arg("p"), py::arg("seed"), py::arg("stream_index") = 0);
    m.def(
        "estimate_rejection_rate",
        [](const std::string& model, double beta0, double beta1, double beta2, double sigma,
           double n, double p, double lambda, double alpha, const std::string& method,
           std::size_t replicates, std::uint64_t seed, unsigned workers, double lambda2,
           double mu2_0) {
            OperatingPoint pt = point_from_kwargs(beta0, beta1, beta2, sigma, n, p, lambda, alpha);
            const auto est = estimate_rejection_rate(
                GenerativeSpec{generative_model_from_name(model), pt}, method_from_name(method),
                alpha, replicates, seed, workers, Beta2Prior{lambda2, mu2_0});
            py::dict d;
            d["rate"] = est.rate;
            d["stderr"] = est.se;
            d["rejections"] = est.rejections;
            d["replicates"] = est.replicates;
            d["degenerate"] = est.degenerate;
            d["errors"] = est.errors;
            return d;
        },
        py::arg("model"), py::arg("beta0"), py::arg("beta1"), py::arg("beta2"), py::arg("sigma"),
        py::arg("n"), py::arg("p"), py::arg("lam"), py::arg("alpha"), py::arg("method"),
        py::arg("replicates"), py::arg("seed"), py::arg("workers") = 1,
        py::arg("lambda2") = 1.0, py::arg("mu2_0") = 0.0);
    m.def(
        "run_sweep_json",
        [](const std::string& config_json, unsigned workers) {
            return run_sweep(SweepConfig::from_json_text(config_json), workers).to_json_text();
        },
        py::arg("config_json"), py::arg("workers") = 1);
    m.def(
        "run_sweep_csv",
        [](const std::string& config_json, unsigned workers) {
            return run_sweep(SweepConfig::from_json_text(config_json), workers).to_csv();
        },
        py::arg("config_json"), py::arg("workers") = 1);

    m.attr("__version__") = "0.1.0";
}

// Command-line front end: analyze a trial CSV, fit a prior from historical
// data, evaluate the asymptotic operating-characteristic formulas, and run
// seeded Monte Carlo sweeps. Data goes to files or stdout; diagnostics go to
// stderr. Every output file is paired with a <file>.manifest.json recording
// the resolved parameters and input digests.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "progbayes/errors.hpp"
#include "progbayes/json_io.hpp"
#include "progbayes/posterior.hpp"
#include "progbayes/prior_elicitation.hpp"
#include "progbayes/run_manifest.hpp"
#include "progbayes/simulator.hpp"
#include "progbayes/special_functions.hpp"
#include "progbayes/theory.hpp"
#include "progbayes/trial_data.hpp"

namespace {

using namespace progbayes;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitLoad = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInternal = 4;

unsigned resolve_workers(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("PROGBAYES_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::string display_name(Method method) {
    switch (method) {
        case Method::unadjusted: return "Unadjusted";
        case Method::prog_adjust: return "Prognostic Covariate Adjustment";
        case Method::bayes: return "Bayesian Prognostic Covariate Adjustment";
        case Method::bayes_beta2:
            return "Bayesian Prognostic Covariate Adjustment (slope prior)";
        case Method::single_arm: return "Single-arm";
    }
    return "?";
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> methods;
    if (list == "all") {
        return {Method::unadjusted, Method::prog_adjust, Method::bayes, Method::single_arm};
    }
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) methods.push_back(method_from_name(item));
    }
    if (methods.empty()) throw LoadError("--methods: empty method list");
    return methods;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write " + path.string());
    out << text;
    if (!out) throw LoadError("failed writing " + path.string());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeOptions {
    std::string data_path;
    double alpha = 0.05;
    std::optional<double> lambda;
    std::string prior_path;
    double lambda2 = 0.0;
    bool has_lambda2 = false;
    double mu2 = 0.0;
    std::string methods = "all";
    std::string out_path;
};

int run_analyze(const AnalyzeOptions& opt) {
    const auto methods = parse_methods(opt.methods);
    const bool wants_bayes =
        std::any_of(methods.begin(), methods.end(),
                    [](Method m) { return m == Method::bayes || m == Method::bayes_beta2; });
    const bool wants_beta2 = std::any_of(methods.begin(), methods.end(),
                                         [](Method m) { return m == Method::bayes_beta2; });

    double lambda = 0.0;
    if (opt.lambda && !opt.prior_path.empty())
        throw LoadError("--lambda and --prior are mutually exclusive");
    if (opt.lambda) {
        lambda = *opt.lambda;
    } else if (!opt.prior_path.empty()) {
        std::ifstream in(opt.prior_path);
        if (!in) throw LoadError("cannot open prior file: " + opt.prior_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw LoadError("prior file is not valid JSON: " + std::string(e.what()));
        }
        lambda = prior_estimate_from_json(j).lambda;
    } else if (wants_bayes) {
        throw LoadError(
            "a Bayesian method was requested but no prior width is available; pass --lambda "
            "or --prior (or restrict --methods)");
    }
    if (wants_beta2 && !opt.has_lambda2)
        throw LoadError("method bayes_beta2 requires --lambda2 (and optionally --mu2)");

    const TrialData trial = load_trial_csv(opt.data_path);

    std::vector<AnalysisReport> reports;
    for (Method m : methods) {
        Beta2Prior b2{opt.lambda2, opt.mu2};
        reports.push_back(analyze_trial(trial, m, opt.alpha, lambda, b2));
    }

    // Human-readable table on stdout.
    std::printf("%-58s %s\n", "Analysis", "Result");
    std::printf("%s\n", std::string(80, '-').c_str());
    for (const auto& r : reports) {
        char result[64];
        std::snprintf(result, sizeof result, "%.2f \xC2\xB1 %.2f%s", r.estimate,
                      1.96 * r.stddev, r.degenerate ? "  [degenerate fit]" : "");
        std::printf("%-58s %s%s\n", display_name(r.method).c_str(), result,
                    r.reject ? "  (reject)" : "");
    }

    json out{{"alpha", opt.alpha}, {"n", trial.n()}, {"reports", json::array()}};
    if (wants_bayes) out["lambda"] = lambda;
    for (const auto& r : reports) out["reports"].push_back(report_to_json(r));

    if (!opt.out_path.empty()) {
        write_text_file(opt.out_path, out.dump(2) + "\n");
        RunManifest manifest;
        manifest.command = "analyze";
        manifest.parameters = json{{"data", opt.data_path},
                                   {"alpha", opt.alpha},
                                   {"methods", opt.methods},
                                   {"out", opt.out_path}};
        if (wants_bayes) manifest.parameters["lambda"] = lambda;
        if (wants_beta2) {
            manifest.parameters["lambda2"] = opt.lambda2;
            manifest.parameters["mu2"] = opt.mu2;
        }
        manifest.add_input(opt.data_path);
        if (!opt.prior_path.empty()) manifest.add_input(opt.prior_path);
        manifest.write_alongside(opt.out_path);
    }
    return kExitOk;
}

// -------------------------------------------------------------- prior-fit --

struct PriorFitOptions {
    std::string data_path;
    std::string mode = "subject";
    double floor_coefficient = 3.0;
    std::string out_path;
};

int run_prior_fit(const PriorFitOptions& opt) {
    const auto hist = load_historical_csv(opt.data_path);
    PriorEstimate estimate;
    if (opt.mode == "subject")
        estimate = subject_level_lambda(hist, opt.floor_coefficient);
    else if (opt.mode == "study")
        estimate = study_level_lambda(hist);
    else
        throw LoadError("--mode must be 'subject' or 'study'");

    const json out = prior_estimate_to_json(estimate);
    if (opt.out_path.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        write_text_file(opt.out_path, out.dump(2) + "\n");
        RunManifest manifest;
        manifest.command = "prior-fit";
        manifest.parameters = json{{"data", opt.data_path},
                                   {"mode", opt.mode},
                                   {"floor", opt.floor_coefficient},
                                   {"out", opt.out_path}};
        manifest.add_input(opt.data_path);
        manifest.write_alongside(opt.out_path);
    }
    std::cerr << "lambda = " << estimate.lambda << " (" << opt.mode << "-level, "
              << estimate.n_subjects << " subjects)\n";
    return kExitOk;
}

// ----------------------------------------------------------------- theory --

struct TheoryOptions {
    OperatingPoint point;
    std::optional<double> n_lambda_sq;
    std::string curve;  // axis field, empty = single point
    std::string values;
    std::string log_range;  // lo:hi:count
    std::string out_path;
    std::string format = "csv";
};

std::vector<double> resolve_curve_values(const TheoryOptions& opt) {
    if (!opt.values.empty() && !opt.log_range.empty())
        throw LoadError("--values and --log-range are mutually exclusive");
    std::vector<double> values;
    if (!opt.values.empty()) {
        std::stringstream ss(opt.values);
        std::string item;
        while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    } else if (!opt.log_range.empty()) {
        double lo = 0.0, hi = 0.0;
        int count = 0;
        if (std::sscanf(opt.log_range.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
            !(lo > 0.0) || !(hi > lo) || count < 2)
            throw LoadError("--log-range must be lo:hi:count with 0 < lo < hi, count >= 2");
        for (int i = 0; i < count; ++i)
            values.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    } else {
        throw LoadError("--curve requires --values or --log-range");
    }
    return values;
}

int run_theory(const TheoryOptions& opt) {
    OperatingPoint base = opt.point;
    double base_a = base.n_lambda_sq();
    if (opt.n_lambda_sq) {
        base = base.with_n_lambda_sq(*opt.n_lambda_sq);
        base_a = *opt.n_lambda_sq;
    }

    // Carry n*lambda^2 exactly alongside each point so that curve values
    // requested on that axis are evaluated and printed verbatim.
    std::vector<std::pair<OperatingPoint, double>> points;
    if (opt.curve.empty()) {
        points.emplace_back(base, base_a);
    } else {
        for (double v : resolve_curve_values(opt)) {
            OperatingPoint pt = base;
            double a = base_a;
            if (opt.curve == "beta0") pt.beta0 = v;
            else if (opt.curve == "beta1") pt.beta1 = v;
            else if (opt.curve == "beta2") pt.beta2 = v;
            else if (opt.curve == "sigma") pt.sigma = v;
            else if (opt.curve == "n") pt.n = v;
            else if (opt.curve == "p") pt.p = v;
            else if (opt.curve == "lambda") pt.lambda = v;
            else if (opt.curve == "n_lambda_sq") pt = pt.with_n_lambda_sq(v);
            else if (opt.curve == "alpha") pt.alpha = v;
            else throw LoadError("unknown --curve field: " + opt.curve);
            if (opt.curve == "n_lambda_sq")
                a = v;
            else if (opt.curve != "beta0" && opt.curve != "beta1" && opt.curve != "beta2" &&
                     opt.curve != "sigma" && opt.curve != "alpha")
                a = pt.n_lambda_sq();
            points.emplace_back(pt, a);
        }
    }

    std::string csv =
        "beta0,beta1,beta2,sigma,n,p,lambda,n_lambda_sq,alpha,rejection_rate,tau,v_hat,"
        "v11_limit,variance_factor,prog_adjust_power,single_arm_power,zero_limit_rate\n";
    json rows = json::array();
    for (const auto& [pt, a] : points) {
        pt.validate();
        const auto out =
            asymptotic_rejection_rate_at(pt.beta0, pt.beta1, pt.sigma, pt.n, pt.p, a, pt.alpha);
        const double prog = prog_adjust_power(pt);
        const double single = single_arm_power(pt);
        const double zero = zero_limit_rate(pt);
        csv += fmt(pt.beta0) + "," + fmt(pt.beta1) + "," + fmt(pt.beta2) + "," + fmt(pt.sigma) +
               "," + fmt(pt.n) + "," + fmt(pt.p) + "," + fmt(pt.lambda) + "," + fmt(a) + "," +
               fmt(pt.alpha) + "," + fmt(out.rejection_rate) +
               "," + fmt(out.tau) + "," + fmt(out.v_hat) + "," + fmt(out.v11_limit) + "," +
               fmt(out.variance_factor) + "," + fmt(prog) + "," + fmt(single) + "," + fmt(zero) +
               "\n";
        json row = theory_row_to_json(pt, out);
        row["n_lambda_sq"] = a;
        row["prog_adjust_power"] = prog;
        row["single_arm_power"] = single;
        row["zero_limit_rate"] = zero;
        rows.push_back(std::move(row));
    }

    const std::string text = opt.format == "json" ? rows.dump(2) + "\n" : csv;
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(opt.out_path, text);
        RunManifest manifest;
        manifest.command = "theory";
        manifest.parameters =
            json{{"beta0", base.beta0},   {"beta1", base.beta1}, {"beta2", base.beta2},
                 {"sigma", base.sigma},   {"n", base.n},         {"p", base.p},
                 {"lambda", base.lambda}, {"n_lambda_sq", base_a},
                 {"alpha", base.alpha},   {"curve", opt.curve},
                 {"values", opt.values},  {"log_range", opt.log_range},
                 {"format", opt.format},  {"out", opt.out_path}};
        manifest.write_alongside(opt.out_path);
    }
    return kExitOk;
}

// --------------------------------------------------------------- simulate --

struct SimulateOptions {
    std::string config_path;
    int workers = 0;
    std::string out_prefix;
};

int run_simulate(const SimulateOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw LoadError("cannot open config: " + opt.config_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto config = SweepConfig::from_json_text(buffer.str());

    const unsigned workers = resolve_workers(opt.workers);
    std::cerr << "running sweep with " << workers << " worker(s), " << config.replicates
              << " replicates per cell\n";
    const auto result = run_sweep(config, workers, &std::cerr);

    const std::filesystem::path csv_path = opt.out_prefix + ".csv";
    const std::filesystem::path json_path = opt.out_prefix + ".json";
    write_text_file(csv_path, result.to_csv());
    write_text_file(json_path, result.to_json_text());

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.parameters = json{{"config", opt.config_path},
                               {"config_resolved", json::parse(config.to_json_text())},
                               {"seed", config.seed},
                               {"out", opt.out_prefix}};
    manifest.add_input(opt.config_path);
    manifest.write_alongside(csv_path);
    manifest.write_alongside(json_path);
    std::cerr << "wrote " << csv_path.string() << ", " << json_path.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian prognostic covariate adjustment for two-arm trials"};
    app.require_subcommand(1);

    AnalyzeOptions analyze_opt;
    auto* analyze = app.add_subcommand("analyze", "Analyze a trial CSV with the chosen methods");
    analyze->add_option("--data", analyze_opt.data_path, "Trial CSV with columns y,w,m")
        ->required();
    analyze->add_option("--alpha", analyze_opt.alpha, "Two-sided significance level");
    auto* lam = analyze->add_option("--lambda", [&analyze_opt](const CLI::results_t& res) {
        analyze_opt.lambda = std::stod(res[0]);
        return true;
    }, "Prior sd of beta0/sigma");
    auto* prior = analyze->add_option("--prior", analyze_opt.prior_path,
                                      "PriorEstimate JSON from 'prior-fit'");
    lam->excludes(prior);
    prior->excludes(lam);
    auto* lam2 = analyze->add_option("--lambda2", analyze_opt.lambda2,
                                     "Prior sd scale on beta2 (for bayes_beta2)");
    analyze->add_option("--mu2", analyze_opt.mu2, "Prior mean of beta2 (for bayes_beta2)");
    analyze->add_option("--methods", analyze_opt.methods,
                        "Comma list of unadjusted,prog_adjust,single_arm,bayes,bayes_beta2 "
                        "or 'all' (= the first four)");
    analyze->add_option("--out", analyze_opt.out_path, "Write the JSON report here");
    analyze->callback([&] { analyze_opt.has_lambda2 = lam2->count() > 0; });

    PriorFitOptions prior_opt;
    auto* prior_fit =
        app.add_subcommand("prior-fit", "Fit the prior width lambda from historical data");
    prior_fit->add_option("--data", prior_opt.data_path, "Historical CSV: study_id,y,m")
        ->required();
    prior_fit->add_option("--mode", prior_opt.mode, "subject or study");
    prior_fit->add_option("--floor", prior_opt.floor_coefficient,
                          "Subject-mode floor coefficient (lambda >= floor/sqrt(N))");
    prior_fit->add_option("--out", prior_opt.out_path, "Write the PriorEstimate JSON here");

    TheoryOptions theory_opt;
    auto* theory = app.add_subcommand(
        "theory", "Evaluate the asymptotic rejection-rate formulas at a point or along a curve");
    theory->add_option("--beta0", theory_opt.point.beta0, "True bias");
    theory->add_option("--beta1", theory_opt.point.beta1, "True treatment effect");
    theory->add_option("--beta2", theory_opt.point.beta2, "True slope (unused by the formulas)");
    theory->add_option("--sigma", theory_opt.point.sigma, "Residual sd");
    theory->add_option("--n", theory_opt.point.n, "Subjects");
    theory->add_option("--p", theory_opt.point.p, "Treated fraction");
    auto* tlam = theory->add_option("--lambda", theory_opt.point.lambda, "Prior width");
    auto* tnls = theory->add_option("--n-lambda-sq", [&theory_opt](const CLI::results_t& res) {
        theory_opt.n_lambda_sq = std::stod(res[0]);
        return true;
    }, "n*lambda^2 (alternative to --lambda)");
    tlam->excludes(tnls);
    tnls->excludes(tlam);
    theory->add_option("--alpha", theory_opt.point.alpha, "Significance level");
    theory->add_option("--curve", theory_opt.curve, "Field to sweep (e.g. n_lambda_sq)");
    theory->add_option("--values", theory_opt.values, "Comma list of curve values");
    theory->add_option("--log-range", theory_opt.log_range, "lo:hi:count, log-spaced");
    theory->add_option("--out", theory_opt.out_path, "Output file (default: stdout)");
    theory->add_option("--format", theory_opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    SimulateOptions sim_opt;
    auto* simulate =
        app.add_subcommand("simulate", "Run a Monte Carlo sweep from a JSON config");
    simulate->add_option("--config", sim_opt.config_path, "SweepConfig JSON")->required();
    simulate->add_option("--workers", sim_opt.workers,
                         "Worker threads (0 = PROGBAYES_WORKERS env or hardware)");
    simulate->add_option("--out", sim_opt.out_prefix, "Output prefix for .csv/.json")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return run_analyze(analyze_opt);
        if (*prior_fit) return run_prior_fit(prior_opt);
        if (*theory) return run_theory(theory_opt);
        if (*simulate) return run_simulate(sim_opt);
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitLoad;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

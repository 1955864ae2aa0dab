#include "progbayes/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "progbayes/errors.hpp"

namespace progbayes {

namespace {

using nlohmann::json;

std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Per-replicate outcome flags packed for order-independent reduction.
struct ReplicateFlags {
    std::uint8_t reject = 0;
    std::uint8_t degenerate = 0;
    std::uint8_t error = 0;
};

void run_replicate_range(const GenerativeSpec& spec, const std::vector<Method>& methods,
                         const Beta2Prior& beta2_prior, std::uint64_t seed, std::size_t r_begin,
                         std::size_t r_end, std::vector<ReplicateFlags>& flags) {
    const std::size_t n_methods = methods.size();
    for (std::size_t r = r_begin; r < r_end; ++r) {
        RandomStream stream(seed, r);
        std::optional<TrialData> trial;
        try {
            trial = generate_trial(spec, stream);
        } catch (const std::exception&) {
            for (std::size_t mi = 0; mi < n_methods; ++mi)
                flags[r * n_methods + mi].error = 1;
            continue;
        }
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            auto& f = flags[r * n_methods + mi];
            try {
                const auto report = analyze_trial(*trial, methods[mi], spec.point.alpha,
                                                  spec.point.lambda, beta2_prior);
                f.reject = report.reject ? 1 : 0;
                f.degenerate = report.degenerate ? 1 : 0;
            } catch (const std::exception&) {
                f.error = 1;
            }
        }
    }
}

/// Runs all replicates for one cell, parallelized over contiguous replicate
/// slices. The per-replicate stream depends only on (seed, replicate index),
/// so the result is identical for any worker count.
std::vector<ReplicateFlags> run_cell(const GenerativeSpec& spec,
                                     const std::vector<Method>& methods,
                                     const Beta2Prior& beta2_prior, std::uint64_t seed,
                                     std::size_t replicates, unsigned workers) {
    std::vector<ReplicateFlags> flags(replicates * methods.size());
    if (workers <= 1 || replicates < 2 * workers) {
        run_replicate_range(spec, methods, beta2_prior, seed, 0, replicates, flags);
        return flags;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (replicates + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(replicates, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            run_replicate_range(spec, methods, beta2_prior, seed, lo, hi, flags);
        });
    }
    for (auto& th : pool) th.join();
    return flags;
}

std::optional<double> theory_for(Method method, const OperatingPoint& point) {
    switch (method) {
        case Method::bayes:
        case Method::bayes_beta2:
            return asymptotic_rejection_rate(point).rejection_rate;
        case Method::prog_adjust:
            return prog_adjust_power(point);
        case Method::single_arm:
            return single_arm_power(point);
        case Method::unadjusted:
            return std::nullopt;
    }
    return std::nullopt;
}

void apply_axis_value(OperatingPoint& point, Beta2Prior& b2, bool& has_n_lambda_sq,
                      double& n_lambda_sq, const std::string& field, double value) {
    if (field == "beta0")
        point.beta0 = value;
    else if (field == "beta1")
        point.beta1 = value;
    else if (field == "beta2")
        point.beta2 = value;
    else if (field == "sigma")
        point.sigma = value;
    else if (field == "n")
        point.n = value;
    else if (field == "p")
        point.p = value;
    else if (field == "lambda")
        point.lambda = value;
    else if (field == "alpha")
        point.alpha = value;
    else if (field == "n_lambda_sq") {
        has_n_lambda_sq = true;
        n_lambda_sq = value;
    } else if (field == "lambda2")
        b2.lambda2 = value;
    else if (field == "mu2_0")
        b2.mu2_0 = value;
    else
        throw LoadError("unknown sweep axis field: " + field);
}

json point_to_json(const OperatingPoint& pt) {
    return json{{"beta0", pt.beta0}, {"beta1", pt.beta1}, {"beta2", pt.beta2},
                {"sigma", pt.sigma}, {"n", pt.n},         {"p", pt.p},
                {"lambda", pt.lambda}, {"alpha", pt.alpha}};
}

OperatingPoint point_from_json(const json& j) {
    OperatingPoint pt;
    if (j.contains("beta0")) pt.beta0 = j.at("beta0").get<double>();
    if (j.contains("beta1")) pt.beta1 = j.at("beta1").get<double>();
    if (j.contains("beta2")) pt.beta2 = j.at("beta2").get<double>();
    if (j.contains("sigma")) pt.sigma = j.at("sigma").get<double>();
    if (j.contains("n")) pt.n = j.at("n").get<double>();
    if (j.contains("p")) pt.p = j.at("p").get<double>();
    if (j.contains("alpha")) pt.alpha = j.at("alpha").get<double>();
    if (j.contains("lambda") && j.contains("n_lambda_sq"))
        throw LoadError("sweep config: give either lambda or n_lambda_sq, not both");
    if (j.contains("lambda")) pt.lambda = j.at("lambda").get<double>();
    if (j.contains("n_lambda_sq")) pt = pt.with_n_lambda_sq(j.at("n_lambda_sq").get<double>());
    return pt;
}

}  // namespace

std::string_view generative_model_name(GenerativeModel model) {
    return model == GenerativeModel::linear ? "linear" : "cubic";
}

GenerativeModel generative_model_from_name(std::string_view name) {
    if (name == "linear") return GenerativeModel::linear;
    if (name == "cubic") return GenerativeModel::cubic;
    throw LoadError("unknown generative model: " + std::string(name));
}

TrialData generate_trial(const GenerativeSpec& spec, RandomStream& stream) {
    const auto& pt = spec.point;
    if (!(pt.sigma >= 0.0) || !std::isfinite(pt.sigma))
        throw std::domain_error("generate_trial: sigma must be nonnegative");
    if (!(pt.p > 0.0 && pt.p < 1.0))
        throw std::domain_error("generate_trial: p must lie in (0, 1)");
    if (!(pt.n >= 1.0) || !std::isfinite(pt.n))
        throw std::domain_error("generate_trial: n must be >= 1");
    const double pn = pt.p * pt.n;
    if (std::fabs(pn - std::round(pn)) > 1e-9)
        throw std::domain_error("generate_trial: p*n must be an integer, got " +
                                std::to_string(pn));
    const auto n = static_cast<std::size_t>(std::llround(pt.n));
    const auto treated = static_cast<std::size_t>(std::llround(pn));

    std::vector<double> m(n), noise(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = stream.next_normal();
    for (std::size_t i = 0; i < n; ++i) noise[i] = stream.next_normal();

    std::vector<int> w(n, 0);
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(treated), 1);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(stream.next_below(i + 1));
        std::swap(w[i], w[j]);
    }

    const bool cubic = spec.model == GenerativeModel::cubic;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = cubic ? m[i] * m[i] * m[i] : m[i];
        y[i] = pt.beta0 + pt.beta1 * w[i] + pt.beta2 * g + pt.sigma * noise[i];
    }
    return TrialData::from_columns(std::move(y), std::move(w), std::move(m));
}

AnalysisReport analyze_trial(const TrialData& data, Method method, double alpha, double lambda,
                             const Beta2Prior& beta2_prior) {
    switch (method) {
        case Method::unadjusted: return unadjusted_analysis(data, alpha);
        case Method::prog_adjust: return prog_adjust_analysis(data, alpha);
        case Method::single_arm: return single_arm_analysis(data, alpha);
        case Method::bayes: return bayes_analysis(data, PriorSpec{lambda}, alpha);
        case Method::bayes_beta2:
            return bayes_beta2_analysis(
                data, ExtendedPriorSpec{lambda, beta2_prior.lambda2, beta2_prior.mu2_0}, alpha);
    }
    throw std::invalid_argument("analyze_trial: unknown method");
}

RateEstimate estimate_rejection_rate(const GenerativeSpec& spec, Method method, double alpha,
                                     std::size_t replicates, std::uint64_t seed, unsigned workers,
                                     const Beta2Prior& beta2_prior) {
    if (replicates < 1)
        throw std::domain_error("estimate_rejection_rate: need at least one replicate");
    GenerativeSpec local = spec;
    local.point.alpha = alpha;
    const std::vector<Method> methods{method};
    const auto flags = run_cell(local, methods, beta2_prior, seed, replicates, workers);

    RateEstimate est;
    est.replicates = replicates;
    for (const auto& f : flags) {
        est.rejections += f.reject;
        est.degenerate += f.degenerate;
        est.errors += f.error;
    }
    est.rate = static_cast<double>(est.rejections) / static_cast<double>(replicates);
    est.se = std::sqrt(est.rate * (1.0 - est.rate) / static_cast<double>(replicates));
    return est;
}

std::uint64_t cell_seed_for(std::uint64_t seed, GenerativeModel model,
                            const OperatingPoint& point) {
    std::uint64_t h = mix64(seed + 0x243F6A8885A308D3ull);
    h = hash_combine(h, model == GenerativeModel::cubic ? 2 : 1);
    h = hash_combine(h, double_bits(point.beta0));
    h = hash_combine(h, double_bits(point.beta1));
    h = hash_combine(h, double_bits(point.beta2));
    h = hash_combine(h, double_bits(point.sigma));
    h = hash_combine(h, double_bits(point.n));
    h = hash_combine(h, double_bits(point.p));
    return h;
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw LoadError(std::string("sweep config is not valid JSON: ") + e.what());
    }
    std::vector<std::string> problems;
    SweepConfig cfg;
    try {
        if (j.contains("model"))
            cfg.model = generative_model_from_name(j.at("model").get<std::string>());
        if (j.contains("point")) cfg.base = point_from_json(j.at("point"));
        if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::size_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lambda2")) cfg.beta2_prior.lambda2 = j.at("lambda2").get<double>();
        if (j.contains("mu2_0")) cfg.beta2_prior.mu2_0 = j.at("mu2_0").get<double>();
        if (j.contains("methods")) {
            for (const auto& name : j.at("methods"))
                cfg.methods.push_back(method_from_name(name.get<std::string>()));
        }
        if (j.contains("axes")) {
            for (const auto& [field, values] : j.at("axes").items()) {
                SweepAxis axis;
                axis.field = field;
                for (const auto& v : values) axis.values.push_back(v.get<double>());
                if (axis.values.empty()) problems.push_back("axis '" + field + "' is empty");
                cfg.axes.push_back(std::move(axis));
            }
        }
    } catch (const json::exception& e) {
        throw LoadError(std::string("sweep config: ") + e.what());
    }
    if (cfg.methods.empty()) problems.emplace_back("no methods listed");
    if (cfg.replicates < 1) problems.emplace_back("replicates must be >= 1");
    bool has_lambda_axis = false, has_nls_axis = false;
    for (const auto& axis : cfg.axes) {
        if (axis.field == "lambda") has_lambda_axis = true;
        if (axis.field == "n_lambda_sq") has_nls_axis = true;
        // Validate the field name early.
        OperatingPoint scratch = cfg.base;
        Beta2Prior b2s = cfg.beta2_prior;
        bool dummy = false;
        double dval = 0.0;
        if (!axis.values.empty()) {
            try {
                apply_axis_value(scratch, b2s, dummy, dval, axis.field, axis.values.front());
            } catch (const LoadError& e) {
                problems.emplace_back(e.what());
            }
        }
    }
    if (has_lambda_axis && has_nls_axis)
        problems.emplace_back("axes 'lambda' and 'n_lambda_sq' are mutually exclusive");
    if (!problems.empty()) {
        std::string msg = "sweep config is invalid:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw LoadError(msg);
    }
    return cfg;
}

std::string SweepConfig::to_json_text() const {
    json axes_json = json::object();
    for (const auto& axis : axes) axes_json[axis.field] = axis.values;
    json methods_json = json::array();
    for (auto m : methods) methods_json.push_back(std::string(method_name(m)));
    json j{{"model", std::string(generative_model_name(model))},
           {"point", point_to_json(base)},
           {"replicates", replicates},
           {"seed", seed},
           {"lambda2", beta2_prior.lambda2},
           {"mu2_0", beta2_prior.mu2_0},
           {"methods", methods_json},
           {"axes", axes_json}};
    return j.dump(2);
}

SweepResult run_sweep(const SweepConfig& config, unsigned workers, std::ostream* progress) {
    if (config.methods.empty()) throw LoadError("run_sweep: no methods listed");
    if (config.replicates < 1) throw LoadError("run_sweep: replicates must be >= 1");

    SweepResult result;
    result.config = config;

    // Enumerate the outer product of the axes; the first axis is outermost.
    std::size_t total_cells = 1;
    for (const auto& axis : config.axes) total_cells *= axis.values.size();
    std::vector<std::size_t> idx(config.axes.size(), 0);

    for (std::size_t cell_no = 0; cell_no < total_cells; ++cell_no) {
        SweepCell cell;
        cell.point = config.base;
        cell.beta2_prior = config.beta2_prior;
        bool has_nls = false;
        double nls = 0.0;
        for (std::size_t ai = 0; ai < config.axes.size(); ++ai)
            apply_axis_value(cell.point, cell.beta2_prior, has_nls, nls, config.axes[ai].field,
                             config.axes[ai].values[idx[ai]]);
        if (has_nls) cell.point = cell.point.with_n_lambda_sq(nls);
        cell.n_lambda_sq = has_nls ? nls : cell.point.n_lambda_sq();
        cell.cell_seed = cell_seed_for(config.seed, config.model, cell.point);

        // Validate the cell; invalid cells become warning rows.
        const double pn = cell.point.p * cell.point.n;
        try {
            cell.point.validate();
            if (std::fabs(pn - std::round(pn)) > 1e-9)
                throw std::domain_error("p*n = " + std::to_string(pn) + " is not an integer");
        } catch (const std::exception& e) {
            cell.skipped = true;
            cell.warning = e.what();
        }

        if (!cell.skipped) {
            GenerativeSpec spec{config.model, cell.point};
            const auto flags = run_cell(spec, config.methods, cell.beta2_prior, cell.cell_seed,
                                        config.replicates, workers);
            const std::size_t n_methods = config.methods.size();
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                CellMethodResult mres;
                mres.method = config.methods[mi];
                for (std::size_t r = 0; r < config.replicates; ++r) {
                    const auto& f = flags[r * n_methods + mi];
                    mres.rejections += f.reject;
                    mres.degenerate += f.degenerate;
                    mres.errors += f.error;
                }
                const auto reps = static_cast<double>(config.replicates);
                mres.rate = static_cast<double>(mres.rejections) / reps;
                mres.se = std::sqrt(mres.rate * (1.0 - mres.rate) / reps);
                try {
                    mres.theory = theory_for(mres.method, cell.point);
                } catch (const std::exception&) {
                    mres.theory = std::nullopt;
                }
                cell.methods.push_back(mres);
            }
        }

        if (progress) {
            (*progress) << "cell " << (cell_no + 1) << "/" << total_cells
                        << (cell.skipped ? " skipped: " + cell.warning : " done") << '\n';
        }
        result.cells.push_back(std::move(cell));

        for (std::size_t ai = config.axes.size(); ai-- > 0;) {
            if (++idx[ai] < config.axes[ai].values.size()) break;
            idx[ai] = 0;
        }
    }
    return result;
}

std::string SweepResult::to_csv() const {
    std::string out =
        "model,beta0,beta1,beta2,sigma,n,p,lambda,n_lambda_sq,alpha,lambda2,mu2_0,"
        "method,replicates,rejections,rate,stderr,theory,degenerate,errors,status\n";
    for (const auto& cell : cells) {
        const auto prefix = std::string(generative_model_name(config.model)) + "," +
                            fmt_double(cell.point.beta0) + "," + fmt_double(cell.point.beta1) +
                            "," + fmt_double(cell.point.beta2) + "," +
                            fmt_double(cell.point.sigma) + "," + fmt_double(cell.point.n) + "," +
                            fmt_double(cell.point.p) + "," + fmt_double(cell.point.lambda) + "," +
                            fmt_double(cell.n_lambda_sq) + "," + fmt_double(cell.point.alpha) +
                            "," + fmt_double(cell.beta2_prior.lambda2) + "," +
                            fmt_double(cell.beta2_prior.mu2_0) + ",";
        if (cell.skipped) {
            std::string warning = cell.warning;
            std::replace(warning.begin(), warning.end(), ',', ';');
            out += prefix + ",,,,,,,," + "skipped: " + warning + "\n";
            continue;
        }
        for (const auto& m : cell.methods) {
            out += prefix + std::string(method_name(m.method)) + "," +
                   std::to_string(config.replicates) + "," + std::to_string(m.rejections) + "," +
                   fmt_double(m.rate) + "," + fmt_double(m.se) + "," +
                   (m.theory ? fmt_double(*m.theory) : std::string()) + "," +
                   std::to_string(m.degenerate) + "," + std::to_string(m.errors) + ",ok\n";
        }
    }
    return out;
}

std::string SweepResult::to_json_text() const {
    json cells_json = json::array();
    for (const auto& cell : cells) {
        json c{{"point", point_to_json(cell.point)},
               {"n_lambda_sq", cell.n_lambda_sq},
               {"lambda2", cell.beta2_prior.lambda2},
               {"mu2_0", cell.beta2_prior.mu2_0},
               {"cell_seed", cell.cell_seed},
               {"skipped", cell.skipped}};
        if (cell.skipped) {
            c["warning"] = cell.warning;
        } else {
            json methods_json = json::array();
            for (const auto& m : cell.methods) {
                json mj{{"method", std::string(method_name(m.method))},
                        {"rejections", m.rejections},
                        {"replicates", config.replicates},
                        {"rate", m.rate},
                        {"stderr", m.se},
                        {"degenerate", m.degenerate},
                        {"errors", m.errors}};
                if (m.theory) mj["theory"] = *m.theory;
                methods_json.push_back(std::move(mj));
            }
            c["methods"] = std::move(methods_json);
        }
        cells_json.push_back(std::move(c));
    }
    json j{{"config", json::parse(config.to_json_text())}, {"cells", std::move(cells_json)}};
    return j.dump(2);
}

}  // namespace progbayes

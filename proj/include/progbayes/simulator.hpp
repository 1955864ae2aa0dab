#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "progbayes/estimators.hpp"
#include "progbayes/posterior.hpp"
#include "progbayes/random_stream.hpp"
#include "progbayes/theory.hpp"
#include "progbayes/trial_data.hpp"

namespace progbayes {

enum class GenerativeModel { linear, cubic };

std::string_view generative_model_name(GenerativeModel model);
GenerativeModel generative_model_from_name(std::string_view name);

/// A data-generating process: prognostic scores are standard normal, control
/// outcomes are beta0 + beta2 * g(m) + sigma * noise with g(m) = m (linear)
/// or m^3 (cubic), treated outcomes add beta1. Assignments are a uniform
/// random permutation of exactly p*n ones, so p*n must be integral.
struct GenerativeSpec {
    GenerativeModel model = GenerativeModel::linear;
    OperatingPoint point;
};

/// Parameters of the informative beta2 prior used by Method::bayes_beta2.
struct Beta2Prior {
    double lambda2 = 1.0;
    double mu2_0 = 0.0;
};

/// Draws one trial from the stream. Draw order is fixed: n prognostic
/// scores, then n noise terms, then the assignment shuffle; a given
/// (seed, stream_index) therefore reproduces the same trial everywhere.
/// sigma = 0 is allowed here (noiseless outcomes); every other OperatingPoint
/// constraint applies, and p*n must be integral.
TrialData generate_trial(const GenerativeSpec& spec, RandomStream& stream);

/// Dispatches one analysis of one trial. lambda is taken from the operating
/// point for the Bayesian methods; beta2_prior is consulted only by
/// Method::bayes_beta2.
AnalysisReport analyze_trial(const TrialData& data, Method method, double alpha, double lambda,
                             const Beta2Prior& beta2_prior = {});

/// Monte Carlo rejection-rate estimate. Replicate r always uses substream
/// index r of the given seed, so the result is independent of the worker
/// count and of any parallel schedule. Replicates whose analysis throws are
/// counted in `errors` (never silently dropped); degenerate zero-variance
/// fits are tallied in `degenerate` and their reject flag is whatever the
/// analysis reported.
struct RateEstimate {
    double rate = 0.0;
    double se = 0.0;
    std::size_t rejections = 0;
    std::size_t replicates = 0;
    std::size_t degenerate = 0;
    std::size_t errors = 0;
};

RateEstimate estimate_rejection_rate(const GenerativeSpec& spec, Method method, double alpha,
                                     std::size_t replicates, std::uint64_t seed,
                                     unsigned workers = 1, const Beta2Prior& beta2_prior = {});

/// One axis of a sweep grid. Field names: beta0, beta1, beta2, sigma, n, p,
/// lambda, n_lambda_sq, alpha, lambda2, mu2_0.
struct SweepAxis {
    std::string field;
    std::vector<double> values;
};

/// Grid description: the outer product of the axes around a base point.
/// Each cell's trials are seeded by hashing the master seed with the cell's
/// data-generating coordinates (model, beta0, beta1, beta2, sigma, n, p), so
/// adding axes never perturbs cells whose coordinates are unchanged, and
/// cells that differ only in analysis parameters (lambda, alpha, lambda2,
/// mu2_0) share substreams, i.e. analyze identical trials.
struct SweepConfig {
    GenerativeModel model = GenerativeModel::linear;
    OperatingPoint base;
    Beta2Prior beta2_prior;
    std::vector<SweepAxis> axes;
    std::size_t replicates = 10000;
    std::uint64_t seed = 0;
    std::vector<Method> methods;

    static SweepConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
};

struct CellMethodResult {
    Method method = Method::bayes;
    std::size_t rejections = 0;
    std::size_t degenerate = 0;
    std::size_t errors = 0;
    double rate = 0.0;
    double se = 0.0;
    /// Asymptotic prediction where one exists (Bayesian methods, covariate
    /// adjustment, single-arm); unset for the unadjusted analysis.
    std::optional<double> theory;
};

struct SweepCell {
    OperatingPoint point;
    Beta2Prior beta2_prior;
    double n_lambda_sq = 0.0;
    std::uint64_t cell_seed = 0;
    bool skipped = false;
    std::string warning;
    std::vector<CellMethodResult> methods;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepCell> cells;

    /// One row per cell x method; skipped cells produce a warning row.
    std::string to_csv() const;
    std::string to_json_text() const;
};

/// Evaluates every cell x method. Within a cell, each replicate generates one
/// trial and feeds it to all requested methods (shared substreams). progress,
/// when given, receives one line per cell.
SweepResult run_sweep(const SweepConfig& config, unsigned workers = 1,
                      std::ostream* progress = nullptr);

/// Seed for one cell: the master seed combined with the data-generating
/// coordinates only.
std::uint64_t cell_seed_for(std::uint64_t seed, GenerativeModel model,
                            const OperatingPoint& point);

}  // namespace progbayes

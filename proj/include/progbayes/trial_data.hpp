#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace progbayes {

/// Per-subject data for one two-arm trial: outcome y, binary assignment w
/// (1 = active treatment), prognostic score m in the same units as y.
///
/// Invariants enforced on construction:
///   - all columns have equal length n >= 4, every value finite, w in {0,1};
///   - both arms are non-empty (the treated count is sum(w), so the treated
///     fraction p satisfies p*n = sum(w) exactly);
///   - m has nonzero sample variance.
/// Immutable after construction; freely shareable across threads.
class TrialData {
  public:
    static TrialData from_columns(std::vector<double> y, std::vector<int> w,
                                  std::vector<double> m);

    std::span<const double> y() const noexcept { return y_; }
    std::span<const int> w() const noexcept { return w_; }
    std::span<const double> m() const noexcept { return m_; }

    std::size_t n() const noexcept { return y_.size(); }
    std::size_t treated_count() const noexcept { return treated_; }
    double treated_fraction() const noexcept {
        return static_cast<double>(treated_) / static_cast<double>(n());
    }

  private:
    TrialData() = default;
    std::vector<double> y_;
    std::vector<int> w_;
    std::vector<double> m_;
    std::size_t treated_ = 0;
};

/// Arm-wise summary used throughout the closed-form algebra. s2_m is the
/// divisor-n sample variance of m (not n-1); the posterior and theory
/// formulas are written in terms of n * s2_m, so the divisor matters.
struct GroupSummary {
    double ybar_control = 0.0;
    double ybar_treated = 0.0;
    double mbar_control = 0.0;
    double mbar_treated = 0.0;
    double mbar = 0.0;
    double s2_m = 0.0;
    std::size_t n_control = 0;
    std::size_t n_treated = 0;
};

GroupSummary summarize(const TrialData& data);

/// Subject-level records from one or more historical studies: observed
/// outcome y and predicted outcome m for each control subject, grouped by
/// study. Every study has at least two rows; all values finite.
class HistoricalSubjects {
  public:
    struct Study {
        std::string id;
        std::vector<double> y;
        std::vector<double> m;
        std::size_t size() const noexcept { return y.size(); }
    };

    static HistoricalSubjects from_rows(const std::vector<std::string>& study_ids,
                                        const std::vector<double>& y,
                                        const std::vector<double>& m);

    std::size_t study_count() const noexcept { return studies_.size(); }
    std::size_t total_subjects() const noexcept { return total_; }
    const Study& study(std::size_t j) const { return studies_.at(j); }
    const std::vector<Study>& studies() const noexcept { return studies_; }

  private:
    std::vector<Study> studies_;
    std::size_t total_ = 0;
};

/// Loads a trial CSV with header columns y,w,m (an optional subject_id column
/// is ignored). UTF-8, '.' decimal separator. Throws LoadError naming the
/// offending row and column.
TrialData load_trial_csv(const std::filesystem::path& path);

/// Writes a trial CSV that round-trips bit-exactly through load_trial_csv.
void write_trial_csv(const TrialData& data, const std::filesystem::path& path);

/// Loads a historical CSV with header columns study_id,y,m.
HistoricalSubjects load_historical_csv(const std::filesystem::path& path);

}  // namespace progbayes

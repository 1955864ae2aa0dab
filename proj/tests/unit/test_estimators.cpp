#include <doctest.h>

#include <cmath>
#include <vector>

#include "progbayes/errors.hpp"
#include "progbayes/estimators.hpp"
#include "progbayes/special_functions.hpp"

#include "../oracles.hpp"

using namespace progbayes;

namespace {

// A random two-arm trial with both arms guaranteed non-empty.
TrialData random_trial(oracles::TestRng& rng, std::size_t n) {
    std::vector<double> y, m;
    std::vector<int> w;
    for (std::size_t i = 0; i < n; ++i) {
        m.push_back(rng.normal());
        w.push_back(rng.uniform() < 0.5 ? 1 : 0);
        y.push_back(0.3 + 0.5 * w.back() + 0.9 * m.back() + rng.normal(0.0, 1.3));
    }
    w[0] = 1;
    w[1] = 0;
    return TrialData::from_columns(y, w, m);
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("ols_fit recovers exact linear relationships") {
    const std::vector<double> x1{1, 1, 1, 1, 1};
    const std::vector<double> x2{0.5, 1.5, -2.0, 3.0, 0.0};
    const std::vector<double> y{2.0 + 3.0 * 0.5, 2.0 + 3.0 * 1.5, 2.0 - 6.0, 2.0 + 9.0, 2.0};
    const auto fit = ols_fit({x1, x2}, y);
    CHECK(fit.coef[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.coef[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.rss == doctest::Approx(0.0).epsilon(1e-18));
    CHECK(fit.df == 3.0);
}

TEST_CASE("ols_fit intercept-only gives the mean") {
    const std::vector<double> ones{1, 1, 1, 1};
    const std::vector<double> y{1.0, 2.0, 3.0, 6.0};
    const auto fit = ols_fit({ones}, y);
    CHECK(fit.coef[0] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("ols_fit matches a generic pseudo-inverse oracle on random instances") {
    oracles::TestRng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 30, k = 3;
        std::vector<std::vector<double>> cols(k, std::vector<double>(n));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            cols[0][i] = 1.0;
            cols[1][i] = rng.normal();
            cols[2][i] = rng.normal(1.0, 2.0);
            y[i] = rng.normal(0.0, 3.0);
        }
        const auto fit = ols_fit(cols, y);

        // Oracle: invert X'X by Gauss-Jordan and apply to X'y.
        std::vector<double> G(k * k, 0.0), b(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t r = 0; r < n; ++r) G[i * k + j] += cols[i][r] * cols[j][r];
            for (std::size_t r = 0; r < n; ++r) b[i] += cols[i][r] * y[r];
        }
        const auto Ginv = oracles::gauss_jordan_inverse(G, k);
        for (std::size_t i = 0; i < k; ++i) {
            double ci = 0.0;
            for (std::size_t j = 0; j < k; ++j) ci += Ginv[i * k + j] * b[j];
            CHECK(fit.coef[i] == doctest::Approx(ci).epsilon(1e-8));
            for (std::size_t j = 0; j < k; ++j)
                CHECK(fit.cov_scale[i * k + j] == doctest::Approx(Ginv[i * k + j]).epsilon(1e-8));
        }

        // Residuals orthogonal to the columns.
        for (std::size_t j = 0; j < k; ++j) {
            double dot = 0.0, scale = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double fitted = 0.0;
                for (std::size_t i = 0; i < k; ++i) fitted += fit.coef[i] * cols[i][r];
                dot += (y[r] - fitted) * cols[j][r];
                scale += std::fabs(y[r] * cols[j][r]);
            }
            CHECK(std::fabs(dot) <= 1e-8 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("ols_fit rejects singular designs") {
    const std::vector<double> x{1, 1, 1, 1};
    const std::vector<double> y{1, 2, 3, 4};
    CHECK_THROWS_AS(ols_fit({x, x}, y), NumericError);
}

TEST_CASE("unadjusted: constant outcome gives zero estimate and no rejection") {
    const auto data = TrialData::from_columns({5, 5, 5, 5}, {0, 1, 0, 1}, {1, 2, 3, 4});
    const auto r = unadjusted_analysis(data, 0.05);
    CHECK(r.estimate == 0.0);
    CHECK_FALSE(r.reject);
    CHECK(r.degenerate);
    CHECK(r.statistic == 0.0);
}

TEST_CASE("unadjusted: y = w is a degenerate perfect fit flagged as rejection") {
    const auto data = TrialData::from_columns({0, 1, 0, 1}, {0, 1, 0, 1}, {1, 2, 3, 4});
    const auto r = unadjusted_analysis(data, 0.05);
    CHECK(r.estimate == doctest::Approx(1.0));
    CHECK(r.degenerate);
    CHECK(r.reject);
    CHECK(std::isinf(r.statistic));
}

TEST_CASE("unadjusted equals the pooled two-sample t-test") {
    oracles::TestRng rng(57);
    for (int rep = 0; rep < 25; ++rep) {
        const auto data = random_trial(rng, 24);
        const auto r = unadjusted_analysis(data, 0.05);
        const auto oracle = oracles::two_sample_pooled_t(
            {data.y().begin(), data.y().end()}, {data.w().begin(), data.w().end()});
        CHECK(r.estimate == doctest::Approx(oracle.estimate).epsilon(1e-10));
        CHECK(r.statistic == doctest::Approx(oracle.statistic).epsilon(1e-10));
        CHECK(r.df == oracle.df);
        const double threshold = student_t_quantile(0.975, oracle.df);
        CHECK(r.reject == (std::fabs(oracle.statistic) > threshold));
    }
}

TEST_CASE("prog_adjust: exact fits and the treatment coefficient") {
    // y = m exactly, balanced arms: estimate 0.
    {
        const std::vector<double> m{0.5, 1.5, -1.0, 2.0};
        const auto data = TrialData::from_columns({0.5, 1.5, -1.0, 2.0}, {1, 0, 1, 0}, m);
        const auto r = prog_adjust_analysis(data, 0.05);
        CHECK(r.estimate == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.degenerate);
        CHECK_FALSE(r.reject);
    }
    // y = m + w: estimate 1, zero residuals.
    {
        const std::vector<double> m{0.5, 1.5, -1.0, 2.0};
        const auto data = TrialData::from_columns({1.5, 1.5, 0.0, 2.0}, {1, 0, 1, 0}, m);
        const auto r = prog_adjust_analysis(data, 0.05);
        CHECK(r.estimate == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.degenerate);
        CHECK(r.reject);
    }
}

TEST_CASE("prog_adjust estimate is invariant to shifting every m by a constant") {
    oracles::TestRng rng(91);
    const auto data = random_trial(rng, 30);
    const auto base = prog_adjust_analysis(data, 0.05);

    std::vector<double> m_shift(data.m().begin(), data.m().end());
    for (auto& v : m_shift) v += 17.25;
    const auto shifted = TrialData::from_columns({data.y().begin(), data.y().end()},
                                                 {data.w().begin(), data.w().end()}, m_shift);
    const auto r = prog_adjust_analysis(shifted, 0.05);
    CHECK(r.estimate == doctest::Approx(base.estimate).epsilon(1e-10));
    CHECK(std::fabs(r.statistic - base.statistic) < 1e-10 * std::max(1.0, std::fabs(base.statistic)));
}

TEST_CASE("single_arm: known cases") {
    // Treated y = m: estimate 0, no rejection.
    {
        const auto data = TrialData::from_columns({0.5, 9.0, -1.0, 9.0}, {1, 0, 1, 0},
                                                  {0.5, 1.0, -1.0, 2.0});
        const auto r = single_arm_analysis(data, 0.05);
        CHECK(r.estimate == 0.0);
        CHECK_FALSE(r.reject);
    }
    // Treated differences all equal and nonzero: zero variance, degenerate rejection.
    {
        const auto data = TrialData::from_columns({1.5, 9.0, 0.0, 9.0, 3.0, 9.0},
                                                  {1, 0, 1, 0, 1, 0},
                                                  {0.5, 1.0, -1.0, 2.0, 2.0, 3.0});
        const auto r = single_arm_analysis(data, 0.05);
        CHECK(r.estimate == doctest::Approx(1.0));
        CHECK(r.degenerate);
        CHECK(r.reject);
    }
    // Fewer than two treated subjects.
    CHECK_THROWS_AS(single_arm_analysis(TrialData::from_columns({1, 2, 3, 4}, {1, 0, 0, 0},
                                                                {0.1, 0.2, 0.3, 0.4}),
                                        0.05),
                    NumericError);
}

TEST_CASE("single_arm equals the standard one-sample t-test on treated differences") {
    oracles::TestRng rng(73);
    for (int rep = 0; rep < 25; ++rep) {
        const auto data = random_trial(rng, 19);
        const auto r = single_arm_analysis(data, 0.05);
        std::vector<double> diffs;
        for (std::size_t i = 0; i < data.n(); ++i)
            if (data.w()[i] == 1) diffs.push_back(data.y()[i] - data.m()[i]);
        const auto oracle = oracles::one_sample_t(diffs);
        CHECK(r.estimate == doctest::Approx(oracle.estimate).epsilon(1e-12));
        CHECK(r.statistic == doctest::Approx(oracle.statistic).epsilon(1e-10));
        CHECK(r.df == oracle.df);
    }
}

TEST_CASE("single_arm ignores control rows entirely") {
    oracles::TestRng rng(99);
    const auto data = random_trial(rng, 22);
    const auto base = single_arm_analysis(data, 0.05);

    std::vector<double> y(data.y().begin(), data.y().end());
    std::vector<double> m(data.m().begin(), data.m().end());
    std::vector<int> w(data.w().begin(), data.w().end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (w[i] == 0) {
            y[i] = rng.normal(100.0, 50.0);
            m[i] = rng.normal(-40.0, 9.0);
        }
    }
    const auto r = single_arm_analysis(TrialData::from_columns(y, w, m), 0.05);
    CHECK(r.estimate == base.estimate);
    CHECK(r.statistic == base.statistic);
    CHECK(r.df == base.df);
    CHECK(r.reject == base.reject);
}

TEST_CASE("report invariants: interval width and rejection rule") {
    oracles::TestRng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        const auto data = random_trial(rng, 16);
        for (const auto& r : {unadjusted_analysis(data, 0.05), prog_adjust_analysis(data, 0.05),
                              single_arm_analysis(data, 0.05)}) {
            CHECK(r.interval_hi - r.interval_lo ==
                  doctest::Approx(2.0 * 1.96 * r.stddev).epsilon(1e-12));
            if (!r.degenerate) {
                const double threshold = student_t_quantile(1.0 - r.alpha / 2.0, r.df);
                CHECK(r.reject == (std::fabs(r.statistic) > threshold));
            }
        }
    }
}

TEST_SUITE_END();

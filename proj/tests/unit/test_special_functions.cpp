#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "progbayes/special_functions.hpp"

#include "../oracles.hpp"

using namespace progbayes;

TEST_SUITE_BEGIN("special_functions");

TEST_CASE("normal_cdf basics") {
    CHECK(normal_cdf(0.0) == 0.5);

    // Frozen from the quadrature oracle; checked against it live below.
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(std::fabs(normal_cdf(1.96) - oracles::normal_cdf(1.96)) < 1e-12);

    CHECK_THROWS_AS(normal_cdf(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(normal_cdf(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("normal_cdf symmetry and monotonicity") {
    oracles::TestRng rng(101);
    double prev_x = -40.0, prev_v = normal_cdf(-40.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-10.0, 10.0);
        const double v = normal_cdf(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(std::fabs(v - (1.0 - normal_cdf(-x))) < 1e-15);
    }
    for (double x = -8.0; x <= 8.0; x += 0.05) {
        const double v = normal_cdf(x);
        CHECK(x > prev_x);
        CHECK(v >= prev_v);
        prev_x = x;
        prev_v = v;
    }
}

TEST_CASE("normal_cdf vs quadrature oracle on a grid") {
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(std::fabs(normal_cdf(x) - oracles::normal_cdf(x)) < 1e-12);
    }
}

TEST_CASE("normal_quantile basics and oracle") {
    CHECK(normal_quantile(0.5) == 0.0);

    // Bisection oracle on normal_cdf.
    const double x975 =
        oracles::bisect_inverse([](double x) { return oracles::normal_cdf(x); }, 0.975, -10, 10);
    CHECK(normal_quantile(0.975) == doctest::Approx(x975).epsilon(1e-10));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));

    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(-0.5), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.5), std::domain_error);
}

TEST_CASE("normal quantile-cdf roundtrip") {
    oracles::TestRng rng(202);
    for (int i = 0; i < 10000; ++i) {
        const double q = rng.uniform(1e-12, 1.0 - 1e-12);
        CHECK(std::fabs(normal_cdf(normal_quantile(q)) - q) <= 1e-10);
    }
    // Tails.
    for (double q : {1e-300, 1e-100, 1e-16, 1.0 - 1e-16}) {
        const double x = normal_quantile(q);
        CHECK(std::isfinite(x));
        CHECK(std::fabs(normal_cdf(x) - q) <= 1e-10);
    }
}

TEST_CASE("student_t_cdf basics") {
    CHECK(student_t_cdf(0.0, 1.0) == 0.5);
    CHECK(student_t_cdf(0.0, 7.3) == 0.5);

    // Cauchy closed form at df = 1.
    CHECK(std::fabs(student_t_cdf(1.0, 1.0) - 0.75) <= 1e-10);
    for (double x = -30.0; x <= 30.0; x += 0.63) {
        const double cauchy = 0.5 + std::atan(x) / 3.141592653589793;
        CHECK(std::fabs(student_t_cdf(x, 1.0) - cauchy) <= 1e-10);
    }

    // Quadrature oracle at df = 10.
    CHECK(std::fabs(student_t_cdf(2.0, 10.0) - oracles::student_t_cdf(2.0, 10.0)) < 1e-12);

    // Converges to the normal CDF at huge df.
    for (double x : {-3.0, -1.0, -0.2, 0.4, 1.7, 2.9}) {
        CHECK(std::fabs(student_t_cdf(x, 1e6) - normal_cdf(x)) < 1e-4);
    }

    CHECK_THROWS_AS(student_t_cdf(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(student_t_cdf(1.0, -2.0), std::domain_error);
}

TEST_CASE("student_t symmetry property") {
    oracles::TestRng rng(303);
    for (int i = 0; i < 500; ++i) {
        const double x = rng.uniform(-8.0, 8.0);
        const double df = rng.uniform(0.5, 60.0);
        CHECK(std::fabs(student_t_cdf(x, df) + student_t_cdf(-x, df) - 1.0) < 1e-13);
    }
}

TEST_CASE("student_t_quantile basics and roundtrip") {
    CHECK(student_t_quantile(0.5, 3.0) == 0.0);
    CHECK(std::fabs(student_t_quantile(0.75, 1.0) - 1.0) <= 1e-10);

    // Bisection oracle on the CDF.
    const double x = oracles::bisect_inverse(
        [](double t) { return student_t_cdf(t, 30.0); }, 0.975, -50, 50);
    CHECK(student_t_quantile(0.975, 30.0) == doctest::Approx(x).epsilon(1e-8));

    oracles::TestRng rng(404);
    for (int i = 0; i < 3000; ++i) {
        const double q = rng.uniform(1e-6, 1.0 - 1e-6);
        const double df = rng.uniform(0.5, 200.0);
        const double t = student_t_quantile(q, df);
        CHECK(std::fabs(student_t_cdf(t, df) - q) <= 1e-8);
    }

    CHECK_THROWS_AS(student_t_quantile(0.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(student_t_quantile(0.975, 0.0), std::domain_error);
}

TEST_CASE("chisq_quantile closed forms") {
    // chi^2 with 2 df is exponential with mean 2: quantile(q) = -2 ln(1-q).
    oracles::TestRng rng(505);
    for (int i = 0; i < 1000; ++i) {
        const double q = rng.uniform(1e-6, 1.0 - 1e-6);
        const double expect = -2.0 * std::log1p(-q);
        CHECK(std::fabs(chisq_quantile(q, 2.0) - expect) <=
              1e-10 * std::max(1.0, std::fabs(expect)));
    }
    CHECK(std::fabs(chisq_quantile(0.025, 2.0) - 0.050635615968579795) <= 1e-10);
}

TEST_CASE("chisq_quantile vs quadrature oracle") {
    // Bisection on the quadrature CDF, df = 3.
    const double expect = oracles::bisect_inverse(
        [](double x) { return oracles::chisq_cdf(x, 3.0); }, 0.025, 0.0, 50.0);
    CHECK(chisq_quantile(0.025, 3.0) == doctest::Approx(expect).epsilon(1e-8));

    oracles::TestRng rng(606);
    for (int i = 0; i < 200; ++i) {
        const double q = rng.uniform(0.001, 0.999);
        const double df = static_cast<double>(rng.uniform_int(2, 40));
        const double x = chisq_quantile(q, df);
        CHECK(std::fabs(oracles::chisq_cdf(x, df) - q) <= 1e-8);
    }

    CHECK_THROWS_AS(chisq_quantile(0.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(chisq_quantile(0.5, 0.0), std::domain_error);
}

TEST_SUITE_END();

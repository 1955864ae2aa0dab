#include <doctest.h>

#include <cmath>
#include <vector>

#include "progbayes/random_stream.hpp"

using namespace progbayes;

TEST_SUITE_BEGIN("random_stream");

TEST_CASE("same (seed, stream) reproduces the sequence exactly") {
    RandomStream a(123456789, 7);
    RandomStream b(123456789, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.position() == 1000);

    RandomStream c(123456789, 7);
    RandomStream d(123456789, 7);
    for (int i = 0; i < 100; ++i) CHECK(c.next_normal() == d.next_normal());
}

TEST_CASE("different stream indexes decorrelate") {
    const std::size_t k = 100000;
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs{
        {0, 1}, {1, 2}, {0, 1000000}, {41, 42}};
    for (auto [s1, s2] : pairs) {
        RandomStream a(99, s1), b(99, s2);
        double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
        for (std::size_t i = 0; i < k; ++i) {
            const double x = a.next_uniform();
            const double y = b.next_uniform();
            sa += x;
            sb += y;
            saa += x * x;
            sbb += y * y;
            sab += x * y;
        }
        const double n = static_cast<double>(k);
        const double cov = sab / n - (sa / n) * (sb / n);
        const double va = saa / n - (sa / n) * (sa / n);
        const double vb = sbb / n - (sb / n) * (sb / n);
        const double r = cov / std::sqrt(va * vb);
        CHECK(std::fabs(r) < 0.02);
    }
}

TEST_CASE("uniforms live strictly inside (0,1)") {
    RandomStream s(3, 0);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = s.next_uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("normal draws pass mean and variance sanity at one million draws") {
    RandomStream s(2024, 0);
    const std::size_t k = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x = s.next_normal();
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(k);
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 / std::sqrt(n));  // 0.004
    CHECK(std::fabs(var - 1.0) < 0.006);
}

TEST_CASE("next_below stays in range and covers the range") {
    RandomStream s(77, 0);
    std::vector<int> seen(10, 0);
    for (int i = 0; i < 10000; ++i) {
        const auto v = s.next_below(10);
        REQUIRE(v < 10);
        ++seen[static_cast<std::size_t>(v)];
    }
    for (int c : seen) CHECK(c > 800);
}

TEST_SUITE_END();

#include "progbayes/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace progbayes {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr int kMaxSeriesIter = 500;
constexpr double kSeriesEps = 1e-15;

// Lentz's algorithm for the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxSeriesIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kSeriesEps) break;
    }
    return h;
}

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxSeriesIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kSeriesEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) = 1 - P(a, x), valid for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxSeriesIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kSeriesEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Acklam's rational approximation to the inverse normal CDF. Raw relative
// accuracy ~1.2e-9 everywhere on (0,1); refined by Halley steps below.
double normal_quantile_approx(double q) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    const double p_high = 1.0 - p_low;
    if (q < p_low) {
        const double u = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    if (q > p_high) {
        const double u = std::sqrt(-2.0 * std::log(1.0 - q));
        return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
               ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    }
    const double r = q - 0.5;
    const double s = r * r;
    return (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * r /
           (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
}

}  // namespace

double normal_cdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("normal_cdf: input must be finite");
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0) || !std::isfinite(q))
        throw std::domain_error("normal_quantile: q must lie in (0, 1)");
    double x = normal_quantile_approx(q);
    // Halley refinement. Skipped in the far tail where the CDF saturates and
    // exp(x^2/2) would overflow; the raw approximation already round-trips
    // there because the density is vanishingly small.
    if (std::fabs(x) < 8.0) {
        for (int i = 0; i < 3; ++i) {
            const double e = normal_cdf(x) - q;
            const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
            const double dx = u / (1.0 + 0.5 * x * u);
            x -= dx;
            if (std::fabs(dx) < 1e-12 * (1.0 + std::fabs(x))) break;
        }
    }
    return x;
}

double student_t_cdf(double x, double df) {
    if (!(df > 0.0) || !std::isfinite(df))
        throw std::domain_error("student_t_cdf: df must be positive");
    if (!std::isfinite(x)) throw std::domain_error("student_t_cdf: x must be finite");
    if (x == 0.0) return 0.5;
    const double t = df / (df + x * x);
    const double half_tail = 0.5 * detail::incomplete_beta(0.5 * df, 0.5, t);
    return x > 0.0 ? 1.0 - half_tail : half_tail;
}

double student_t_quantile(double q, double df) {
    if (!(q > 0.0 && q < 1.0) || !std::isfinite(q))
        throw std::domain_error("student_t_quantile: q must lie in (0, 1)");
    if (!(df > 0.0) || !std::isfinite(df))
        throw std::domain_error("student_t_quantile: df must be positive");
    if (q == 0.5) return 0.0;
    // Solve in the upper half and reflect.
    const bool flip = q < 0.5;
    const double qq = flip ? 1.0 - q : q;

    // Bracket [0, hi] with F(hi) >= qq.
    double hi = 2.0;
    while (student_t_cdf(hi, df) < qq && hi < 1e300) hi *= 2.0;
    double lo = 0.0;

    // Newton from a normal-quantile start, bisection fallback.
    double x = normal_quantile(qq);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int i = 0; i < 100; ++i) {
        const double f = student_t_cdf(x, df) - qq;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double dens = detail::student_t_pdf(x, df);
        double next = x - f / dens;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double dx = std::fabs(next - x);
        x = next;
        if (dx < 1e-12 * (1.0 + std::fabs(x))) break;
    }
    return flip ? -x : x;
}

double chisq_quantile(double q, double df) {
    if (!(q > 0.0 && q < 1.0) || !std::isfinite(q))
        throw std::domain_error("chisq_quantile: q must lie in (0, 1)");
    if (!(df > 0.0) || !std::isfinite(df))
        throw std::domain_error("chisq_quantile: df must be positive");
    const double a = 0.5 * df;

    // Wilson-Hilferty starting point.
    const double z = normal_quantile(q);
    const double h = 2.0 / (9.0 * df);
    double x = df * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
    if (!(x > 0.0) || !std::isfinite(x)) x = df;

    // Bracket.
    double lo = 0.0;
    double hi = x;
    while (detail::incomplete_gamma_p(a, 0.5 * hi) < q && hi < 1e300) hi *= 2.0;
    if (detail::incomplete_gamma_p(a, 0.5 * x) > q) {
        lo = 0.0;
    } else {
        lo = x;
    }

    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        const double f = detail::incomplete_gamma_p(a, 0.5 * x) - q;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double dens = detail::chisq_pdf(x, df);
        double next = (dens > 0.0) ? x - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double dx = std::fabs(next - x);
        x = next;
        if (dx < 1e-13 * (1.0 + std::fabs(x))) break;
    }
    return x;
}

namespace detail {

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("incomplete_beta: a and b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double incomplete_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("incomplete_gamma_p: a must be positive");
    if (x < 0.0) throw std::domain_error("incomplete_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double student_t_pdf(double x, double df) {
    const double lg = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                      0.5 * std::log(df * 3.141592653589793);
    return std::exp(lg - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

double chisq_pdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    const double a = 0.5 * df;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - std::lgamma(a) - a * std::log(2.0));
}

}  // namespace detail

}  // namespace progbayes

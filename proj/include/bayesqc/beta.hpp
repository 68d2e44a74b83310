#pragma once

// Beta-binomial machinery for the fraction nonconforming: special functions,
// conjugate posterior, equal-tailed credible intervals and the classical
// binomial confidence intervals used as comparison baselines.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "bayesqc/error.hpp"

namespace bayesqc {

// X failed out of n inspected.
struct CountData {
    std::uint64_t failed = 0;
    std::uint64_t inspected = 0;

    void validate() const {
        if (failed > inspected)
            throw DomainError("failed count " + std::to_string(failed) + " exceeds inspected count " +
                              std::to_string(inspected));
    }

    // X / n, undefined when nothing was inspected.
    std::optional<double> sample_fraction() const {
        if (inspected == 0) return std::nullopt;
        return static_cast<double>(failed) / static_cast<double>(inspected);
    }
};

struct BetaParams {
    double a = 0.5;
    double b = 0.5;

    static constexpr BetaParams jeffreys() noexcept { return {0.5, 0.5}; }

    void validate() const {
        if (!(a > 0.0 && std::isfinite(a) && b > 0.0 && std::isfinite(b)))
            throw DomainError("Beta shapes must be positive and finite");
    }

    double mean() const noexcept { return a / (a + b); }
    double variance() const noexcept {
        const double s = a + b;
        return a * b / (s * s * (s + 1.0));
    }

    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;  // 1 - alpha

    double width() const noexcept { return upper - lower; }
};

using CredibleInterval = Interval;

namespace detail {

inline void require_positive(double z, const char* what) {
    if (!(z > 0.0) || !std::isfinite(z)) throw DomainError(std::string(what) + ": argument must be positive and finite");
}

inline void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

constexpr double half_log_two_pi = 0.91893853320467274178032973640562;

// Tail of the Stirling series, ln Gamma(z) - ((z - 1/2) ln z - z + ln sqrt(2 pi)).
inline double stirling_correction(double z) {
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12.0 +
                  inv2 * (-1.0 / 360.0 +
                          inv2 * (1.0 / 1260.0 +
                                  inv2 * (-1.0 / 1680.0 +
                                          inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
}

// Asymptotic Stirling series, accurate to double precision for z >= 15.
inline double log_gamma_stirling(double z) {
    return (z - 0.5) * std::log(z) - z + half_log_two_pi + stirling_correction(z);
}

// Continued fraction for the incomplete beta (modified Lentz).
inline double incomplete_beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
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
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

// ln Gamma(z) for z > 0. Small arguments are shifted into the Stirling range
// with the recurrence Gamma(z+1) = z Gamma(z).
inline double log_gamma(double z) {
    detail::require_positive(z, "log_gamma");
    if (z == 1.0 || z == 2.0) return 0.0;
    if (z >= 15.0) return detail::log_gamma_stirling(z);
    double shift = 0.0;
    double product = 1.0;
    while (z < 15.0) {
        product *= z;
        z += 1.0;
        if (product > 1e280) {
            shift += std::log(product);
            product = 1.0;
        }
    }
    return detail::log_gamma_stirling(z) - shift - std::log(product);
}

inline double log_beta(double a, double b) {
    detail::require_positive(a, "log_beta");
    detail::require_positive(b, "log_beta");
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline BetaParams posterior(const CountData& counts, const BetaParams& prior = BetaParams::jeffreys()) {
    counts.validate();
    prior.validate();
    return {static_cast<double>(counts.failed) + prior.a,
            static_cast<double>(counts.inspected - counts.failed) + prior.b};
}

// (X + a) / (n + a + b)
inline double posterior_mean(const CountData& counts, const BetaParams& prior = BetaParams::jeffreys()) {
    return posterior(counts, prior).mean();
}

// Same quantity written as the data-weighted blend of the sample fraction and
// the prior mean. Kept separate so the two forms can be checked against
// each other.
inline double posterior_mean_weighted(const CountData& counts, const BetaParams& prior = BetaParams::jeffreys()) {
    counts.validate();
    prior.validate();
    const auto frac = counts.sample_fraction();
    if (!frac) return prior.mean();
    const double n = static_cast<double>(counts.inspected);
    const double total = n + prior.a + prior.b;
    return (n / total) * *frac + ((prior.a + prior.b) / total) * prior.mean();
}

inline double beta_log_pdf(double x, const BetaParams& p) {
    p.validate();
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_log_pdf: x outside [0,1]");
    const double inf = std::numeric_limits<double>::infinity();
    if (x == 0.0) return p.a < 1.0 ? inf : (p.a == 1.0 ? -log_beta(p.a, p.b) : -inf);
    if (x == 1.0) return p.b < 1.0 ? inf : (p.b == 1.0 ? -log_beta(p.a, p.b) : -inf);
    return (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) - log_beta(p.a, p.b);
}

inline double beta_pdf(double x, const BetaParams& p) { return std::exp(beta_log_pdf(x, p)); }

namespace detail {

// ln(x^a (1-x)^b / B(a,b)). For large shapes the lgamma terms are huge and
// nearly cancel, so the Stirling form is expanded around x0 = a/(a+b).
inline double log_beta_front(double x, double a, double b) {
    if (std::min(a, b) < 15.0) return a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    const double s = a + b;
    const double d = std::fma(x, s, -a);  // (x - x0) s
    return a * std::log1p(d / a) + b * std::log1p(-d / b) + 0.5 * std::log(a * b / s) - half_log_two_pi +
           stirling_correction(s) - stirling_correction(a) - stirling_correction(b);
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double beta_cdf(double x, const BetaParams& p) {
    p.validate();
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_cdf: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = detail::log_beta_front(x, p.a, p.b);
    if (x < (p.a + 1.0) / (p.a + p.b + 2.0))
        return std::exp(log_front) * detail::incomplete_beta_cf(p.a, p.b, x) / p.a;
    return 1.0 - std::exp(log_front) * detail::incomplete_beta_cf(p.b, p.a, 1.0 - x) / p.b;
}

// Inverse of beta_cdf: safeguarded Newton iteration (derivative = pdf) that
// falls back to bisection whenever a step leaves the current bracket.
inline double beta_quantile(double q, const BetaParams& p) {
    p.validate();
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("beta_quantile: level outside [0,1]");
    if (q == 0.0) return 0.0;
    if (q == 1.0) return 1.0;

    constexpr int max_iter = 200;
    constexpr double tol = 1e-10;

    double lo = 0.0;
    double hi = 1.0;
    double x = std::clamp(p.mean(), 1e-12, 1.0 - 1e-12);
    double best = x;
    double best_err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        const double f = beta_cdf(x, p) - q;
        if (std::fabs(f) < best_err) {
            best_err = std::fabs(f);
            best = x;
        }
        if (std::fabs(f) <= 1e-14) return x;
        if (f < 0.0)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * x) break;

        const double dens = beta_pdf(x, p);
        double next = (dens > 0.0 && std::isfinite(dens)) ? x - f / dens : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        // Residual is at the cdf's own rounding floor.
        if (std::fabs(f) <= tol && std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * x) break;
        x = next;
    }
    return best;
}

inline CredibleInterval credible_interval(const BetaParams& p, double alpha = 0.05) {
    detail::require_alpha(alpha);
    return {beta_quantile(alpha / 2.0, p), beta_quantile(1.0 - alpha / 2.0, p), 1.0 - alpha};
}

// Jeffreys interval: credible interval of the posterior under Beta(1/2, 1/2).
inline CredibleInterval jeffreys_interval(const CountData& counts, double alpha = 0.05) {
    return credible_interval(posterior(counts, BetaParams::jeffreys()), alpha);
}

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley correction step against erfc, which brings it to ~1e-15.
inline double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("normal_quantile: level must lie in (0,1)");
    static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                             6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                             3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (q < p_low) {
        const double t = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    } else if (q <= 1.0 - p_low) {
        const double t = q - 0.5;
        const double r = t * t;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double t = std::sqrt(-2.0 * std::log1p(-q));
        x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    // Upper half works with the complement so the residual keeps its digits.
    const double e = q <= 0.5 ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - q
                              : (1.0 - q) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

namespace detail {

inline double two_sided_z(double alpha) {
    require_alpha(alpha);
    return normal_quantile(1.0 - alpha / 2.0);
}

inline double checked_fraction(const CountData& counts) {
    counts.validate();
    if (counts.inspected == 0) throw DomainError("classical interval needs at least one inspected item");
    return *counts.sample_fraction();
}

}  // namespace detail

// p̂ ± z sqrt(p̂(1-p̂)/n). Limits are not clipped to [0,1].
inline Interval wald_interval(const CountData& counts, double alpha = 0.05) {
    const double p = detail::checked_fraction(counts);
    const double n = static_cast<double>(counts.inspected);
    const double z = detail::two_sided_z(alpha);
    const double half = z * std::sqrt(p * (1.0 - p) / n);
    return {p - half, p + half, 1.0 - alpha};
}

inline Interval wilson_interval(const CountData& counts, double alpha = 0.05) {
    const double p = detail::checked_fraction(counts);
    const double n = static_cast<double>(counts.inspected);
    const double z = detail::two_sided_z(alpha);
    const double z2 = z * z;
    const double centre = p + z2 / (2.0 * n);
    const double half = z * std::sqrt((p * (1.0 - p) + z2 / (4.0 * n)) / n);
    const double denom = 1.0 + z2 / n;
    return {(centre - half) / denom, (centre + half) / denom, 1.0 - alpha};
}

// Variant with the sample fraction p̂ as centre and n + z^2 in the standard
// error, as tabulated for the comparison study.
inline Interval agresti_coull_interval(const CountData& counts, double alpha = 0.05) {
    const double p = detail::checked_fraction(counts);
    const double n = static_cast<double>(counts.inspected);
    const double z = detail::two_sided_z(alpha);
    const double half = z * std::sqrt(p * (1.0 - p) / (n + z * z));
    return {p - half, p + half, 1.0 - alpha};
}

}  // namespace bayesqc

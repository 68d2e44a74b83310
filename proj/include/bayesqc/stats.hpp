#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bayesqc/error.hpp"

namespace bayesqc {

// Empirical quantile of already-sorted data, linear interpolation between
// order statistics (Hyndman-Fan type 7, the R default).
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level outside [0,1]");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> sorted_copy(std::span<const double> xs) {
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    return v;
}

inline double empirical_quantile(std::span<const double> xs, double q) {
    const auto s = sorted_copy(xs);
    return quantile_sorted(s, q);
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("mean of empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw DomainError("variance needs at least two values");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

struct QuantileRow {
    double level;
    double value;
};

// Quantiles at 0, step, 2*step, ..., 1. Default is the 10% grid used by the
// forecast and rework reports.
inline std::vector<QuantileRow> quantile_grid(std::span<const double> xs, double step = 0.1) {
    if (!(step > 0.0 && step <= 1.0)) throw DomainError("quantile step must lie in (0,1]");
    const auto s = sorted_copy(xs);
    const auto count = static_cast<int>(std::lround(1.0 / step));
    std::vector<QuantileRow> rows;
    rows.reserve(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) {
        const double level = std::min(1.0, i * step);
        rows.push_back({level, quantile_sorted(s, level)});
    }
    return rows;
}

}  // namespace bayesqc

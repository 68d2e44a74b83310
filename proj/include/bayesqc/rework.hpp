#pragma once

// Quality-induced rework on a linear production line modelled as an absorbing
// Markov chain. Product i is re-made with probability p_i, otherwise the line
// advances; the last product advances into the absorbing "completed" state.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bayesqc/beta.hpp"
#include "bayesqc/error.hpp"
#include "bayesqc/ingest.hpp"
#include "bayesqc/rng.hpp"
#include "bayesqc/stats.hpp"

namespace bayesqc::rework {

inline constexpr double kDefaultEfficiency = 1.2;
inline constexpr std::size_t kDefaultIterations = 1000;

struct ProductSpec {
    std::string id;
    std::string type;  // products of the same type share historical data
    BetaParams posterior;
    double estimated_hours = 0.0;
    double efficiency = kDefaultEfficiency;

    void validate() const {
        posterior.validate();
        if (!(estimated_hours >= 0.0) || !std::isfinite(estimated_hours))
            throw DomainError("product " + id + ": estimated hours must be non-negative");
        if (!(efficiency > 0.0) || !std::isfinite(efficiency))
            throw DomainError("product " + id + ": efficiency must be positive");
    }
};

inline ProductSpec make_product(std::string id, std::string type, const CountData& history, double estimated_hours,
                                double efficiency = kDefaultEfficiency, const BetaParams& prior = BetaParams::jeffreys()) {
    ProductSpec s{std::move(id), std::move(type), posterior(history, prior), estimated_hours, efficiency};
    s.validate();
    return s;
}

// Specs file: product_id, type, inspected, repaired, estimated_hours and an
// optional efficiency column. Row order is the manufacturing order.
inline std::vector<ProductSpec> parse_specs(std::istream& in, const BetaParams& prior = BetaParams::jeffreys(),
                                            double default_efficiency = kDefaultEfficiency,
                                            const ingest::Schema& schema = {}) {
    const auto t = ingest::read_table(in, schema);
    const std::size_t c_id = t.require("product_id");
    const std::size_t c_n = t.require("inspected");
    const std::size_t c_x = t.require("repaired");
    const std::size_t c_h = t.require("estimated_hours");
    const auto c_type = t.column("type");
    const auto c_eta = t.column("efficiency");
    std::vector<ProductSpec> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const CountData history{ingest::count_field(t, r, c_x), ingest::count_field(t, r, c_n)};
        if (history.failed > history.inspected)
            throw SchemaError("line " + std::to_string(t.lines[r]) + ": repaired exceeds inspected");
        const double eta = c_eta ? ingest::number_field(t, r, *c_eta) : default_efficiency;
        out.push_back(make_product(t.rows[r][c_id], c_type ? t.rows[r][*c_type] : std::string{}, history,
                                   ingest::number_field(t, r, c_h), eta, prior));
    }
    if (out.empty()) throw SchemaError("specs file lists no products");
    return out;
}

// Dense row-major matrix, just enough for the chain algebra.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DomainError("matrix product: shape mismatch");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double v = a(i, k);
                if (v == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += v * b(k, j);
            }
        return out;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DomainError("matrix difference: shape mismatch");
        Matrix out = a;
        for (std::size_t i = 0; i < out.data_.size(); ++i) out.data_[i] -= b.data_[i];
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Gauss-Jordan elimination with partial pivoting.
inline Matrix invert(Matrix a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DomainError("invert: matrix is not square");
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw DomainError("invert: matrix is singular");
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(piv, c), a(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

// Canonical form P = [Q R; 0 I] for n transient products and one absorbing
// completion state.
struct MarkovMatrices {
    std::vector<double> p;
    Matrix P;  // (n+1) x (n+1)
    Matrix Q;  // n x n, diagonal p_i, superdiagonal 1 - p_i
    Matrix R;  // n x 1, only the last entry (1 - p_n) is non-zero
    Matrix I;  // 1 x 1

    std::size_t size() const noexcept { return p.size(); }
};

namespace detail {

inline void check_probabilities(std::span<const double> p) {
    if (p.empty()) throw DomainError("transition_matrix: need at least one product");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 1.0)
            throw DomainError("product " + std::to_string(i + 1) + " has p = 1: rework always occurs and it never completes");
        if (!(p[i] >= 0.0 && p[i] < 1.0))
            throw DomainError("product " + std::to_string(i + 1) + ": fraction nonconforming must lie in [0,1)");
    }
}

}  // namespace detail

inline MarkovMatrices transition_matrix(std::span<const double> p) {
    detail::check_probabilities(p);
    const std::size_t n = p.size();
    MarkovMatrices m{std::vector<double>(p.begin(), p.end()), Matrix(n + 1, n + 1), Matrix(n, n), Matrix(n, 1),
                     Matrix::identity(1)};
    for (std::size_t i = 0; i < n; ++i) {
        m.P(i, i) = p[i];
        m.P(i, i + 1) = 1.0 - p[i];
        m.Q(i, i) = p[i];
        if (i + 1 < n)
            m.Q(i, i + 1) = 1.0 - p[i];
        else
            m.R(i, 0) = 1.0 - p[i];
    }
    m.P(n, n) = 1.0;
    return m;
}

// N = (I - Q)^-1 from the upper-triangular closed form N_ij = 1/(1 - p_j),
// j >= i. Dense Gauss-Jordan inversion is computed alongside and must agree
// to 1e-10 (relative to entry size).
inline Matrix fundamental_matrix(const MarkovMatrices& m) {
    const std::size_t n = m.size();
    detail::check_probabilities(m.p);
    Matrix closed(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) closed(i, j) = 1.0 / (1.0 - m.p[j]);
    const Matrix dense = invert(Matrix::identity(n) - m.Q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::fabs(closed(i, j) - dense(i, j)) > 1e-10 * std::max(1.0, std::fabs(closed(i, j))))
                throw DomainError("fundamental matrix: closed form and dense inverse disagree");
    return closed;
}

struct ReworkBreakdown {
    std::vector<double> per_product;
    double total = 0.0;
};

// eta_i * t_i * (N_1i - 1) with N_1i = 1/(1 - p_i).
inline ReworkBreakdown expected_rework_hours(std::span<const double> p, std::span<const ProductSpec> specs) {
    if (p.size() != specs.size()) throw DomainError("expected_rework_hours: p and specs differ in length");
    detail::check_probabilities(p);
    ReworkBreakdown out;
    out.per_product.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        specs[i].validate();
        const double h = specs[i].efficiency * specs[i].estimated_hours * (1.0 / (1.0 - p[i]) - 1.0);
        out.per_product.push_back(h);
        out.total += h;
    }
    return out;
}

struct ReworkEstimate {
    std::vector<double> samples;
    std::vector<QuantileRow> quantiles;
    double mean = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {

inline constexpr double kMaxDrawnP = 1.0 - 1e-12;
inline constexpr int kRedrawCap = 10;

inline double draw_p(Engine& eng, const BetaParams& post) {
    for (int attempt = 0; attempt <= kRedrawCap; ++attempt) {
        const double p = draw_beta(eng, post.a, post.b);
        if (p < kMaxDrawnP) return p;
    }
    throw DomainError("posterior draws keep landing at p = 1; rework hours are unbounded");
}

// One sample of sum_{i in products} eta_i t_i (1/(1-p_i) - 1) per iteration.
// Iteration it draws from stream stream_base + it.
inline std::vector<double> simulate_sum(std::span<const ProductSpec> products, std::span<const BetaParams> posteriors,
                                        std::size_t iterations, std::uint64_t seed, std::uint64_t stream_base) {
    std::vector<double> out;
    out.reserve(iterations);
    for (std::size_t it = 0; it < iterations; ++it) {
        Engine eng = make_engine(seed, stream_base + it);
        double total = 0.0;
        for (std::size_t i = 0; i < products.size(); ++i) {
            const double p = draw_p(eng, posteriors[i]);
            total += products[i].efficiency * products[i].estimated_hours * (1.0 / (1.0 - p) - 1.0);
        }
        out.push_back(total);
    }
    return out;
}

inline std::vector<BetaParams> posteriors_of(std::span<const ProductSpec> specs) {
    std::vector<BetaParams> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(s.posterior);
    return out;
}

}  // namespace detail

// Planning-phase distribution of total rework hours: every iteration draws
// each p_i from its posterior and evaluates the total.
inline ReworkEstimate simulate_total_rework(std::span<const ProductSpec> specs,
                                            std::size_t iterations = kDefaultIterations, std::uint64_t seed = 1) {
    if (iterations == 0) throw DomainError("simulate_total_rework: need at least one iteration");
    if (specs.empty()) throw DomainError("simulate_total_rework: no products");
    for (const auto& s : specs) s.validate();
    const auto post = detail::posteriors_of(specs);
    ReworkEstimate e;
    e.seed = seed;
    e.samples = detail::simulate_sum(specs, post, iterations, seed, 0);
    e.quantiles = quantile_grid(e.samples, 0.1);
    e.mean = mean(e.samples);
    return e;
}

struct ControlLimits {
    double cl = 0.0;   // median
    double ucl = 0.0;  // 97.5% quantile
    double lcl = 0.0;  // 2.5% quantile
};

inline ControlLimits control_limits(const ReworkEstimate& estimate) {
    if (estimate.samples.empty()) throw DomainError("control_limits: empty estimate");
    const auto s = sorted_copy(estimate.samples);
    return {quantile_sorted(s, 0.5), quantile_sorted(s, 0.975), quantile_sorted(s, 0.025)};
}

// Observed outcome of one completed product.
struct ActualResult {
    double rework_hours = 0.0;
    bool failed = false;  // failed its inspection and was reworked
};

// Actuals file: rework_hours and result (0 pass, 1 fail), in manufacturing
// order. A header-only file means no product has been completed yet.
inline std::vector<ActualResult> parse_actuals(std::istream& in, const ingest::Schema& schema = {}) {
    const auto t = ingest::read_table(in, schema);
    const std::size_t c_h = t.require("rework_hours");
    const std::size_t c_r = t.require("result");
    std::vector<ActualResult> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto res = ingest::count_field(t, r, c_r);
        if (res > 1) throw SchemaError("line " + std::to_string(t.lines[r]) + ": result must be 0 or 1");
        out.push_back({ingest::number_field(t, r, c_h), res == 1});
    }
    return out;
}

enum class Flag { InControl, AboveUcl, BelowLcl };

inline const char* to_string(Flag f) {
    switch (f) {
        case Flag::InControl: return "in_control";
        case Flag::AboveUcl: return "above_ucl";
        case Flag::BelowLcl: return "below_lcl";
    }
    return "in_control";
}

struct ChartPoint {
    std::size_t state = 0;  // products completed so far
    double median = 0.0;
    double band_low = 0.0;   // 2.5%
    double band_high = 0.0;  // 97.5%
    double accrued_actual = 0.0;
    Flag flag = Flag::InControl;
};

struct ControlChartSeries {
    ControlLimits limits;
    std::vector<ChartPoint> points;
};

struct ChartOptions {
    std::size_t iterations = kDefaultIterations;
    std::uint64_t seed = 1;
    // Update the posterior of each remaining product with the outcomes already
    // observed for products of the same type. Off: historical posteriors only.
    bool update_posteriors = false;
};

// Execution-phase chart. State 0 is the planning estimate; state k (1..m)
// adds the actual rework hours of products 1..k to a Monte Carlo forecast of
// products k+1..n. When all n products are reported, state n carries the
// actual total with a zero-width band. Limits come from the state-0 estimate.
inline ControlChartSeries control_chart(std::span<const ProductSpec> specs, std::span<const ActualResult> actuals,
                                        const ChartOptions& opts = {}) {
    const std::size_t n = specs.size();
    if (n == 0) throw DomainError("control_chart: no products");
    if (actuals.size() > n) throw DomainError("control_chart: more actual results than products");
    if (opts.iterations == 0) throw DomainError("control_chart: need at least one iteration");
    for (const auto& s : specs) s.validate();
    for (const auto& a : actuals)
        if (!(a.rework_hours >= 0.0) || !std::isfinite(a.rework_hours))
            throw DomainError("control_chart: actual rework hours must be non-negative");

    const auto planning = simulate_total_rework(specs, opts.iterations, opts.seed);
    ControlChartSeries chart;
    chart.limits = control_limits(planning);

    auto flag_of = [&](double v) {
        if (v > chart.limits.ucl) return Flag::AboveUcl;
        if (v < chart.limits.lcl) return Flag::BelowLcl;
        return Flag::InControl;
    };

    double accrued = 0.0;
    for (std::size_t k = 0; k <= actuals.size(); ++k) {
        if (k > 0) accrued += actuals[k - 1].rework_hours;
        ChartPoint pt;
        pt.state = k;
        pt.accrued_actual = accrued;
        if (k == n) {
            pt.median = pt.band_low = pt.band_high = accrued;
        } else {
            const auto remaining = specs.subspan(k);
            auto post = detail::posteriors_of(remaining);
            if (opts.update_posteriors) {
                for (std::size_t r = 0; r < remaining.size(); ++r) {
                    if (remaining[r].type.empty()) continue;
                    for (std::size_t d = 0; d < k; ++d) {
                        if (specs[d].type != remaining[r].type) continue;
                        (actuals[d].failed ? post[r].a : post[r].b) += 1.0;
                    }
                }
            }
            auto samples = detail::simulate_sum(remaining, post, opts.iterations, opts.seed,
                                                static_cast<std::uint64_t>(k) * opts.iterations);
            for (double& s : samples) s += accrued;
            const auto sorted = sorted_copy(samples);
            pt.median = quantile_sorted(sorted, 0.5);
            pt.band_low = quantile_sorted(sorted, 0.025);
            pt.band_high = quantile_sorted(sorted, 0.975);
        }
        pt.flag = flag_of(pt.median);
        chart.points.push_back(pt);
    }
    return chart;
}

}  // namespace bayesqc::rework

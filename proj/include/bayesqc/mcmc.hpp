#pragma once

// Random-walk Metropolis-Hastings for the fraction nonconforming posterior
// p^(X+a-1) (1-p)^(n-X+b-1), with the trace/ACF diagnostics and empirical
// summaries built on top of the draws.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bayesqc/beta.hpp"
#include "bayesqc/error.hpp"
#include "bayesqc/rng.hpp"
#include "bayesqc/stats.hpp"

namespace bayesqc::mcmc {

struct ChainConfig {
    std::size_t iterations = 10000;
    std::size_t burn_in = 200;
    double proposal_sd = 0.05;
    std::optional<double> initial;  // defaults to (X + 1/2) / (n + 1)
    std::uint64_t seed = 20190101;
    std::uint64_t stream = 0;  // chain index; runs with the same seed but different streams are independent

    void validate() const {
        if (!(iterations > burn_in)) throw DomainError("chain needs more iterations than burn-in draws");
        if (!(proposal_sd > 0.0) || !std::isfinite(proposal_sd)) throw DomainError("proposal_sd must be positive");
        if (initial && !(*initial > 0.0 && *initial < 1.0)) throw DomainError("initial value must lie in (0,1)");
    }
};

class Chain {
public:
    Chain(std::vector<double> draws, ChainConfig config, double acceptance_rate, CountData counts, BetaParams prior)
        : draws_(std::move(draws)), config_(config), acceptance_rate_(acceptance_rate), counts_(counts), prior_(prior) {}

    std::span<const double> draws() const noexcept { return draws_; }
    std::span<const double> post_burn_in() const noexcept {
        return std::span<const double>(draws_).subspan(std::min(config_.burn_in, draws_.size()));
    }
    const ChainConfig& config() const noexcept { return config_; }
    double acceptance_rate() const noexcept { return acceptance_rate_; }
    const CountData& counts() const noexcept { return counts_; }
    const BetaParams& prior() const noexcept { return prior_; }

private:
    std::vector<double> draws_;
    ChainConfig config_;
    double acceptance_rate_;
    CountData counts_;
    BetaParams prior_;
};

inline double default_initial(const CountData& counts) {
    const double p0 = (static_cast<double>(counts.failed) + 0.5) / (static_cast<double>(counts.inspected) + 1.0);
    return std::clamp(p0, 1e-6, 1.0 - 1e-6);
}

// Step i: propose p* = p + N(0, sd^2); accept when u < min(1, target ratio),
// evaluated in log space. Proposals outside (0,1) have zero target density
// and are always rejected.
inline Chain sample_posterior(const CountData& counts, const BetaParams& prior, const ChainConfig& config) {
    counts.validate();
    prior.validate();
    config.validate();

    const double k_succ = static_cast<double>(counts.failed) + prior.a - 1.0;
    const double k_fail = static_cast<double>(counts.inspected - counts.failed) + prior.b - 1.0;
    auto log_target = [&](double p) { return k_succ * std::log(p) + k_fail * std::log1p(-p); };

    Engine eng = make_engine(config.seed, config.stream);
    std::normal_distribution<double> step(0.0, config.proposal_sd);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double p = config.initial.value_or(default_initial(counts));
    double lp = log_target(p);
    std::vector<double> draws;
    draws.reserve(config.iterations);
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < config.iterations; ++i) {
        const double proposal = p + step(eng);
        const double u = unif(eng);
        if (proposal > 0.0 && proposal < 1.0) {
            const double lq = log_target(proposal);
            const double log_rho = std::min(0.0, lq - lp);
            if (u < std::exp(log_rho)) {
                p = proposal;
                lp = lq;
                ++accepted;
            }
        }
        draws.push_back(p);
    }
    return Chain(std::move(draws), config, static_cast<double>(accepted) / static_cast<double>(config.iterations),
                 counts, prior);
}

// Sample autocorrelation at lags 0..max_lag. A constant series has no
// variance; its ACF is reported as 1 at lag 0 and 0 elsewhere.
inline std::vector<double> acf(std::span<const double> xs, std::size_t max_lag) {
    if (xs.size() < 2) throw DomainError("acf needs at least two draws");
    if (max_lag >= xs.size()) throw DomainError("acf max_lag must be smaller than the series length");
    std::vector<double> out(max_lag + 1, 0.0);
    out[0] = 1.0;
    // Constant chain: define the higher lags as 0 rather than 0/0.
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return out;
    const double m = mean(xs);
    double denom = 0.0;
    for (double x : xs) denom += (x - m) * (x - m);
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (std::size_t t = 0; t + k < xs.size(); ++t) num += (xs[t] - m) * (xs[t + k] - m);
        out[k] = num / denom;
    }
    return out;
}

inline std::vector<double> acf(const Chain& chain, std::size_t max_lag) { return acf(chain.post_burn_in(), max_lag); }

inline CredibleInterval empirical_interval(std::span<const double> xs, double alpha = 0.05) {
    detail::require_alpha(alpha);
    if (xs.empty()) throw DomainError("empirical_interval of empty chain");
    const auto s = sorted_copy(xs);
    return {quantile_sorted(s, alpha / 2.0), quantile_sorted(s, 1.0 - alpha / 2.0), 1.0 - alpha};
}

inline CredibleInterval empirical_interval(const Chain& chain, double alpha = 0.05) {
    return empirical_interval(chain.post_burn_in(), alpha);
}

// Boxplot payload. Whiskers follow the 1.5 * IQR rule; min and max are the
// sample extremes, which the tabulated summaries report alongside quartiles.
struct FiveNumber {
    double whisker_low = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_high = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> outliers;
};

inline FiveNumber empirical_five_number(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("five-number summary of empty chain");
    const auto s = sorted_copy(xs);
    FiveNumber f;
    f.q1 = quantile_sorted(s, 0.25);
    f.median = quantile_sorted(s, 0.5);
    f.q3 = quantile_sorted(s, 0.75);
    f.min = s.front();
    f.max = s.back();
    const double iqr = f.q3 - f.q1;
    const double lo_fence = f.q1 - 1.5 * iqr;
    const double hi_fence = f.q3 + 1.5 * iqr;
    f.whisker_low = *std::lower_bound(s.begin(), s.end(), lo_fence);
    f.whisker_high = *std::prev(std::upper_bound(s.begin(), s.end(), hi_fence));
    for (double x : s)
        if (x < lo_fence || x > hi_fence) f.outliers.push_back(x);
    return f;
}

inline FiveNumber empirical_five_number(const Chain& chain) { return empirical_five_number(chain.post_burn_in()); }

struct ResidualReport {
    double mae_lower = 0.0;
    double mae_upper = 0.0;
    double rmse_lower = 0.0;
    double rmse_upper = 0.0;
};

// MAE and RMSE of numeric against analytic limits, lower and upper separately.
inline ResidualReport residual_metrics(std::span<const CredibleInterval> numeric,
                                       std::span<const CredibleInterval> analytic) {
    if (numeric.size() != analytic.size()) throw DomainError("residual_metrics: interval lists differ in length");
    ResidualReport r;
    if (numeric.empty()) return r;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double dl = numeric[i].lower - analytic[i].lower;
        const double du = numeric[i].upper - analytic[i].upper;
        r.mae_lower += std::fabs(dl);
        r.mae_upper += std::fabs(du);
        r.rmse_lower += dl * dl;
        r.rmse_upper += du * du;
    }
    const double n = static_cast<double>(numeric.size());
    r.mae_lower /= n;
    r.mae_upper /= n;
    r.rmse_lower = std::sqrt(r.rmse_lower / n);
    r.rmse_upper = std::sqrt(r.rmse_upper / n);
    return r;
}

// Endpoint-wise average of the empirical intervals of `runs` chains that
// share config.seed and use streams config.stream, config.stream + 1, ...
inline CredibleInterval averaged_interval(const CountData& counts, const BetaParams& prior, ChainConfig config,
                                          std::size_t runs, double alpha = 0.05) {
    if (runs == 0) throw DomainError("averaged_interval needs at least one run");
    double lo = 0.0;
    double hi = 0.0;
    const std::uint64_t base = config.stream;
    for (std::size_t r = 0; r < runs; ++r) {
        config.stream = base + r;
        const auto iv = empirical_interval(sample_posterior(counts, prior, config), alpha);
        lo += iv.lower;
        hi += iv.upper;
    }
    const double n = static_cast<double>(runs);
    return {lo / n, hi / n, 1.0 - alpha};
}

}  // namespace bayesqc::mcmc

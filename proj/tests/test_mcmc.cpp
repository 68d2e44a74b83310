#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bayesqc/beta.hpp"
#include "bayesqc/mcmc.hpp"
#include "bayesqc/stats.hpp"

using namespace bayesqc;
using namespace bayesqc::mcmc;

TEST(Chain, DeterministicPerSeedAndStream) {
    ChainConfig cfg;
    cfg.iterations = 2000;
    const auto a = sample_posterior({10, 100}, BetaParams::jeffreys(), cfg);
    const auto b = sample_posterior({10, 100}, BetaParams::jeffreys(), cfg);
    EXPECT_TRUE(std::equal(a.draws().begin(), a.draws().end(), b.draws().begin()));
    cfg.stream = 1;
    const auto c = sample_posterior({10, 100}, BetaParams::jeffreys(), cfg);
    EXPECT_FALSE(std::equal(a.draws().begin(), a.draws().end(), c.draws().begin()));
}

TEST(Chain, StaysInsideUnitInterval) {
    ChainConfig cfg;
    cfg.proposal_sd = 0.5;
    for (auto counts : {CountData{0, 50}, CountData{50, 50}, CountData{0, 0}}) {
        const auto ch = sample_posterior(counts, BetaParams::jeffreys(), cfg);
        for (double p : ch.draws()) {
            EXPECT_GT(p, 0.0);
            EXPECT_LT(p, 1.0);
        }
        EXPECT_GT(ch.acceptance_rate(), 0.0);
        EXPECT_LE(ch.acceptance_rate(), 1.0);
    }
}

TEST(Chain, PostBurnInLength) {
    ChainConfig cfg;
    cfg.iterations = 1000;
    cfg.burn_in = 100;
    EXPECT_EQ(sample_posterior({3, 40}, BetaParams::jeffreys(), cfg).post_burn_in().size(), 900u);
    cfg.burn_in = 1000;
    EXPECT_THROW(sample_posterior({3, 40}, BetaParams::jeffreys(), cfg), DomainError);
}

TEST(Chain, MomentsMatchPosterior) {
    ChainConfig cfg;
    cfg.iterations = 60000;
    cfg.burn_in = 1000;
    const CountData c{25, 180};
    const auto ch = sample_posterior(c, BetaParams::jeffreys(), cfg);
    const auto post = posterior(c);
    EXPECT_NEAR(mean(ch.post_burn_in()), post.mean(), 0.003);
    EXPECT_NEAR(std::sqrt(variance(ch.post_burn_in())), std::sqrt(post.variance()), 0.003);
}

TEST(Chain, AveragedIntervalNearAnalytic) {
    ChainConfig cfg;
    const CountData c{41, 1055};
    const auto numeric = averaged_interval(c, BetaParams::jeffreys(), cfg, 10);
    const auto exact = jeffreys_interval(c);
    EXPECT_NEAR(numeric.lower, exact.lower, 0.002);
    EXPECT_NEAR(numeric.upper, exact.upper, 0.003);
}

TEST(Acf, KnownSeries) {
    const std::vector<double> alt{1, -1, 1, -1, 1, -1, 1, -1};
    const auto a = acf(alt, 2);
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_NEAR(a[1], -7.0 / 8.0, 1e-12);
    EXPECT_NEAR(a[2], 6.0 / 8.0, 1e-12);
    const std::vector<double> flat(10, 0.3);
    const auto f = acf(flat, 3);
    EXPECT_EQ(f, (std::vector<double>{1, 0, 0, 0}));
    EXPECT_THROW(acf(flat, 10), DomainError);
}

TEST(FiveNumber, WhiskerRule) {
    std::vector<double> xs;
    for (int i = 1; i <= 20; ++i) xs.push_back(i);
    xs.push_back(100.0);
    const auto f = empirical_five_number(xs);
    EXPECT_DOUBLE_EQ(f.median, 11.0);
    EXPECT_DOUBLE_EQ(f.q1, 6.0);
    EXPECT_DOUBLE_EQ(f.q3, 16.0);
    EXPECT_DOUBLE_EQ(f.whisker_high, 20.0);
    EXPECT_DOUBLE_EQ(f.whisker_low, 1.0);
    EXPECT_DOUBLE_EQ(f.max, 100.0);
    ASSERT_EQ(f.outliers.size(), 1u);
}

TEST(FiveNumber, TheoreticalQuartilesOfOperatorA) {
    // 25 of 180 under the Jeffreys prior.
    const auto post = posterior({25, 180});
    EXPECT_NEAR(beta_quantile(0.25, post), 0.123, 0.001);
    EXPECT_NEAR(beta_quantile(0.50, post), 0.140, 0.001);
    EXPECT_NEAR(beta_quantile(0.75, post), 0.158, 0.001);
}

TEST(Residuals, MaeAndRmse) {
    const std::vector<CredibleInterval> num{{0.1, 0.5, 0.95}, {0.2, 0.6, 0.95}};
    const std::vector<CredibleInterval> ana{{0.1, 0.4, 0.95}, {0.1, 0.6, 0.95}};
    const auto r = residual_metrics(num, ana);
    EXPECT_NEAR(r.mae_lower, 0.05, 1e-12);
    EXPECT_NEAR(r.mae_upper, 0.05, 1e-12);
    EXPECT_NEAR(r.rmse_lower, std::sqrt(0.005), 1e-12);
    EXPECT_GE(r.rmse_upper, r.mae_upper);
    EXPECT_THROW(residual_metrics(std::vector<CredibleInterval>(1), ana), DomainError);
}

TEST(Quantiles, Type7) {
    const std::vector<double> xs{4, 1, 3, 2};
    EXPECT_DOUBLE_EQ(empirical_quantile(xs, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(xs, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(empirical_quantile(xs, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(empirical_quantile(xs, 1.0 / 3.0), 2.0);
    const auto grid = quantile_grid(xs, 0.1);
    ASSERT_EQ(grid.size(), 11u);
    EXPECT_DOUBLE_EQ(grid.back().level, 1.0);
}

#include <sstream>

#include <gtest/gtest.h>

#include "bayesqc/forecast.hpp"

using namespace bayesqc;
using namespace bayesqc::forecast;

namespace {

ingest::GroupKey key(std::string nps) { return {std::move(nps), "STD", "Material A", "BW", ""}; }

}  // namespace

TEST(Forecast, SingleTypeBracketsPosteriorMean) {
    const BetaParams post{40.5, 960.5};
    ProjectDesign d{{{key("2"), post, 1}}};
    const auto r = simulate_project(d, 2000, 3);
    EXPECT_LT(r.quantiles.front().value, post.mean());
    EXPECT_GT(r.quantiles.back().value, post.mean());
    EXPECT_NEAR(mean(r.samples), post.mean(), 0.001);
}

TEST(Forecast, PerWeldAverageMeanAndVariance) {
    // Mean of the average is the count-weighted mean; its variance shrinks
    // like 1/n for a single type.
    const BetaParams a{5.5, 95.5};
    const BetaParams b{20.5, 180.5};
    ProjectDesign d{{{key("2"), a, 30}, {key("3"), b, 10}}};
    const auto r = simulate_project(d, 4000, 5);
    EXPECT_NEAR(mean(r.samples), (30 * a.mean() + 10 * b.mean()) / 40.0, 0.001);
    const double want_var = (30 * a.variance() + 10 * b.variance()) / (40.0 * 40.0);
    EXPECT_NEAR(variance(r.samples), want_var, 0.15 * want_var);
}

TEST(Forecast, MixtureMode) {
    const BetaParams a{2.5, 97.5};
    const BetaParams b{30.5, 70.5};
    ProjectDesign d{{{key("2"), a, 50}, {key("3"), b, 50}}};
    const auto r = simulate_project(d, 4000, 5, Mode::Mixture);
    EXPECT_NEAR(mean(r.samples), 0.5 * (a.mean() + b.mean()), 0.01);
    EXPECT_LT(r.quantiles[2].value, 0.06);
    EXPECT_GT(r.quantiles[8].value, 0.2);
}

TEST(Forecast, DeterministicAndDegenerate) {
    ProjectDesign d{{{key("2"), {3.5, 50.5}, 10}}};
    EXPECT_EQ(simulate_project(d, 50, 9).samples, simulate_project(d, 50, 9).samples);
    const auto one = simulate_project(d, 1, 9);
    ASSERT_EQ(one.quantiles.size(), 11u);
    for (const auto& q : one.quantiles) EXPECT_EQ(q.value, one.samples[0]);
    EXPECT_THROW(simulate_project(d, 0, 9), DomainError);
}

TEST(Forecast, ResolveDesign) {
    const std::vector<ingest::GroupSummary> history{{key("2"), 100, 80, 4}, {key("3"), 50, 40, 1}};
    const auto table = posterior_table(history);
    std::istringstream in("nps,schedule,material,weld_kind,count\n2.00,STD,Material A,BW,12\n3,STD,Material A,BW,0\n");
    const auto design = resolve_design(parse_design(in), table);
    ASSERT_EQ(design.components.size(), 1u);
    EXPECT_EQ(design.total_welds(), 12u);
    EXPECT_EQ(design.components[0].posterior, (BetaParams{4.5, 76.5}));
    EXPECT_THROW(resolve_design({{key("4"), 3}}, table), ConfigError);
    EXPECT_THROW(resolve_design({}, table), ConfigError);
}

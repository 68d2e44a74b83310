#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bayesqc/rework.hpp"

using namespace bayesqc;
using namespace bayesqc::rework;

namespace {

std::vector<ProductSpec> ten_welds() {
    const std::vector<std::pair<CountData, double>> rows{{{2, 21}, 3.0}, {{1, 23}, 2.5}, {{0, 7}, 3.0},  {{2, 14}, 1.5},
                                                         {{2, 17}, 2.0}, {{3, 37}, 1.0}, {{1, 10}, 3.0}, {{4, 41}, 3.0},
                                                         {{3, 55}, 2.5}, {{6, 51}, 2.0}};
    std::vector<ProductSpec> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.push_back(make_product(std::to_string(i + 1), "T" + std::to_string(i + 1), rows[i].first, rows[i].second));
    return out;
}

std::vector<ActualResult> over_control() {
    std::vector<ActualResult> a(10);
    a[3] = {1.8, true};
    a[4] = {2.4, true};
    a[5] = {1.2, true};
    return a;
}

}  // namespace

TEST(Markov, CanonicalForm) {
    const std::vector<double> p{0.1, 0.2, 0.3};
    const auto m = transition_matrix(p);
    ASSERT_EQ(m.P.rows(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 4; ++c) s += m.P(r, c);
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
    EXPECT_DOUBLE_EQ(m.Q(0, 0), 0.1);
    EXPECT_DOUBLE_EQ(m.Q(0, 1), 0.9);
    EXPECT_DOUBLE_EQ(m.R(2, 0), 0.7);
    EXPECT_DOUBLE_EQ(m.P(3, 3), 1.0);
    EXPECT_THROW(transition_matrix(std::vector<double>{0.2, 1.0}), DomainError);
    EXPECT_THROW(transition_matrix(std::vector<double>{-0.1}), DomainError);
}

TEST(Markov, FundamentalMatrixClosedForm) {
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(0.0, 0.99);
    for (std::size_t n : {1, 3, 10, 50}) {
        std::vector<double> p(n);
        for (auto& v : p) v = u(eng);
        const auto m = transition_matrix(p);
        const auto N = fundamental_matrix(m);
        const auto dense = invert(Matrix::identity(n) - m.Q);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_NEAR(N(i, j), dense(i, j), 1e-10);
                EXPECT_DOUBLE_EQ(N(i, j), j >= i ? 1.0 / (1.0 - p[j]) : 0.0);
            }
    }
}

TEST(Rework, ExpectedHoursIdentity) {
    const auto specs = ten_welds();
    std::vector<double> p(specs.size(), 0.1);
    const auto b = expected_rework_hours(p, specs);
    double want = 0.0;
    for (const auto& s : specs) want += 1.2 * s.estimated_hours * (1.0 / 0.9 - 1.0);
    EXPECT_NEAR(b.total, want, 1e-12);
}

TEST(Rework, PlanningEstimate) {
    const auto e = simulate_total_rework(ten_welds(), 1000, 1);
    EXPECT_EQ(e.samples.size(), 1000u);
    EXPECT_NEAR(e.quantiles[5].value, 3.4, 0.2);
    double analytic = 0.0;
    for (const auto& s : ten_welds()) analytic += s.efficiency * s.estimated_hours * s.posterior.a / (s.posterior.b - 1);
    EXPECT_NEAR(analytic, 3.537, 0.001);
    EXPECT_NEAR(e.mean, analytic, 0.15);
    const auto l = control_limits(e);
    EXPECT_LT(l.lcl, l.cl);
    EXPECT_LT(l.cl, l.ucl);
}

TEST(Rework, ZeroHoursGiveZero) {
    std::vector<ProductSpec> specs{make_product("1", "", {1, 10}, 0.0)};
    const auto e = simulate_total_rework(specs, 20, 1);
    for (double v : e.samples) EXPECT_EQ(v, 0.0);
}

TEST(ControlChart, EmptyActualsIsPlanningEstimate) {
    const auto specs = ten_welds();
    const auto chart = control_chart(specs, {}, {});
    ASSERT_EQ(chart.points.size(), 1u);
    EXPECT_DOUBLE_EQ(chart.points[0].median, chart.limits.cl);
}

TEST(ControlChart, OverControlScenario) {
    const auto chart = control_chart(ten_welds(), over_control(), {});
    ASSERT_EQ(chart.points.size(), 11u);
    EXPECT_EQ(chart.points[6].flag, Flag::AboveUcl);
    EXPECT_DOUBLE_EQ(chart.points.back().median, 5.4);
    EXPECT_DOUBLE_EQ(chart.points.back().band_low, chart.points.back().band_high);
}

TEST(ControlChart, NoReworkDecreasesToZero) {
    const auto chart = control_chart(ten_welds(), std::vector<ActualResult>(10), {});
    for (std::size_t k = 1; k < chart.points.size(); ++k) EXPECT_LT(chart.points[k].median, chart.points[k - 1].median);
    EXPECT_EQ(chart.points.back().median, 0.0);
}

TEST(ControlChart, PosteriorUpdate) {
    auto specs = ten_welds();
    for (auto& s : specs) s.type = "same";
    ChartOptions opts;
    opts.update_posteriors = true;
    const auto with = control_chart(specs, over_control(), opts);
    opts.update_posteriors = false;
    const auto without = control_chart(specs, over_control(), opts);
    EXPECT_GT(with.points[6].median, without.points[6].median);
}

TEST(ControlChart, Validation) {
    const auto specs = ten_welds();
    EXPECT_THROW(control_chart(specs, std::vector<ActualResult>(11), {}), DomainError);
    EXPECT_THROW(control_chart(specs, std::vector<ActualResult>{{-1.0, false}}, {}), DomainError);
}

TEST(Parse, SpecsAndActuals) {
    std::istringstream s("product_id,type,inspected,repaired,estimated_hours\n1,A,21,2,3.0\n2,A,7,0,1.5\n");
    const auto specs = parse_specs(s);
    ASSERT_EQ(specs.size(), 2u);
    EXPECT_EQ(specs[0].posterior, (BetaParams{2.5, 19.5}));
    EXPECT_DOUBLE_EQ(specs[1].efficiency, kDefaultEfficiency);
    std::istringstream bad("product_id,inspected,repaired,estimated_hours\n1,2,3,1.0\n");
    EXPECT_THROW(parse_specs(bad), SchemaError);
    std::istringstream a("rework_hours,result\n0,0\n1.8,1\n");
    const auto actuals = parse_actuals(a);
    ASSERT_EQ(actuals.size(), 2u);
    EXPECT_TRUE(actuals[1].failed);
    std::istringstream a2("rework_hours,result\n0,2\n");
    EXPECT_THROW(parse_actuals(a2), SchemaError);
}

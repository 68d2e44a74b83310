#include <vector>

#include <gtest/gtest.h>

#include "bayesqc/ab_test.hpp"
#include "bayesqc/rng.hpp"

using namespace bayesqc;

namespace {

std::vector<double> beta_sample(double a, double b, std::uint64_t stream, std::size_t n = 20000) {
    Engine eng = make_engine(3, stream);
    std::vector<double> out(n);
    for (auto& v : out) v = draw_beta(eng, a, b);
    return out;
}

}  // namespace

TEST(ProbGreater, OperatorComparison) {
    const auto a = beta_sample(25.5, 155.5, 0);
    const auto b = beta_sample(10.5, 130.5, 1);
    EXPECT_NEAR(ab::prob_greater(a, b).prob_a_greater, 0.975, 0.01);
}

TEST(ProbGreater, ComplementaryAndSelf) {
    const auto a = beta_sample(5.5, 95.5, 0);
    const auto b = beta_sample(6.5, 90.5, 1);
    const double ab_ = ab::prob_greater(a, b, 100000, 1, 0).prob_a_greater;
    const double ba = ab::prob_greater(b, a, 100000, 1, 1).prob_a_greater;
    EXPECT_NEAR(ab_ + ba, 1.0, 0.02);
    EXPECT_NEAR(ab::prob_greater(a, a, 100000, 1, 2).prob_a_greater, 0.5, 0.01);
}

TEST(ProbGreater, TiesCountForA) {
    const std::vector<double> same{0.1, 0.1, 0.1};
    EXPECT_EQ(ab::prob_greater(same, same, 100).prob_a_greater, 1.0);
    EXPECT_THROW(ab::prob_greater({}, same), DomainError);
    EXPECT_THROW(ab::prob_greater(same, same, 0), DomainError);
}

TEST(ProbGreater, Deterministic) {
    const auto a = beta_sample(2, 30, 0, 500);
    const auto b = beta_sample(3, 30, 1, 500);
    EXPECT_EQ(ab::prob_greater(a, b, 1000, 9).prob_a_greater, ab::prob_greater(a, b, 1000, 9).prob_a_greater);
}

TEST(PairwiseMatrix, DiagonalAndShape) {
    const auto a = beta_sample(25.5, 155.5, 0, 5000);
    const auto b = beta_sample(10.5, 130.5, 1, 5000);
    const auto c = beta_sample(4.5, 100.5, 2, 5000);
    const auto m = ab::pairwise_matrix({a, b, c}, 20000, 4);
    ASSERT_EQ(m.size, 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m(i, i), 0.5);
    EXPECT_GT(m(0, 1), 0.9);
    EXPECT_LT(m(1, 0), 0.1);
    EXPECT_NEAR(m(0, 2) + m(2, 0), 1.0, 0.02);
    const auto single = ab::pairwise_matrix({a}, 10, 1);
    EXPECT_EQ(single.values, std::vector<double>{0.5});
}

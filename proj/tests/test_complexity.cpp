#include <cmath>
#include <random>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "bayesqc/complexity.hpp"

using namespace bayesqc;
using namespace bayesqc::complexity;

namespace {

std::vector<BetaParams> eight_products() {
    const std::vector<CountData> c{{5, 200}, {4, 170}, {2, 50}, {2, 48}, {2, 100}, {2, 99}, {4, 98}, {4, 101}};
    std::vector<BetaParams> out;
    for (const auto& x : c) out.push_back(posterior(x));
    return out;
}

}  // namespace

TEST(Hellinger, ClosedFormAgainstQuadrature) {
    std::mt19937_64 eng(8);
    std::uniform_real_distribution<double> shape(1.0, 40.0);
    for (int t = 0; t < 50; ++t) {
        const BetaParams p{shape(eng), shape(eng)};
        const BetaParams q{shape(eng), shape(eng)};
        auto f = [&](double x) {
            if (x <= 0.0 || x >= 1.0) return 0.0;
            return std::sqrt(beta_pdf(x, p) * beta_pdf(x, q));
        };
        const double bc = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-13);
        EXPECT_NEAR(hellinger(p, q), std::sqrt(std::max(0.0, 1.0 - bc)), 1e-7);
    }
}

TEST(Hellinger, MetricAxioms) {
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> shape(0.5, 80.0);
    for (int t = 0; t < 300; ++t) {
        const BetaParams x{shape(eng), shape(eng)}, y{shape(eng), shape(eng)}, z{shape(eng), shape(eng)};
        const double xy = hellinger(x, y);
        EXPECT_GE(xy, 0.0);
        EXPECT_LE(xy, 1.0);
        EXPECT_EQ(xy, hellinger(y, x));
        EXPECT_EQ(hellinger(x, x), 0.0);
        EXPECT_LE(hellinger(x, z), xy + hellinger(y, z) + 1e-12);
    }
}

TEST(Hellinger, PrintedEntries) {
    const auto m = distance_matrix(eight_products());
    EXPECT_NEAR(m(0, 1), 0.0602, 5e-4);
    EXPECT_NEAR(m(4, 5), 0.0057, 5e-4);
    EXPECT_NEAR(m(0, 3), 0.4290, 5e-4);
    EXPECT_NEAR(m(6, 7), 0.0230, 5e-4);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(m(i, i), 0.0);
}

TEST(Scores, EightProducts) {
    const auto s = complexity_scores(eight_products());
    ASSERT_EQ(s.size(), 8u);
    EXPECT_EQ(s.front().label, "5");
    EXPECT_EQ(s.front().scaled_score, 0.0);
    EXPECT_EQ(s.back().label, "4");
    EXPECT_EQ(s.back().scaled_score, 10.0);
    for (std::size_t k = 1; k < s.size(); ++k) {
        EXPECT_GE(s[k].scaled_score, s[k - 1].scaled_score);
        EXPECT_GE(s[k].median, s[k - 1].median);
    }
}

TEST(Scores, SingleProduct) {
    const auto s = complexity_scores({posterior({3, 50})});
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].scaled_score, 0.0);
}

TEST(Cluster, FourPairs) {
    const auto tree = agglomerative_cluster(distance_matrix(eight_products()));
    EXPECT_EQ(tree.merges.size(), 7u);
    for (std::size_t m = 1; m < tree.merges.size(); ++m) EXPECT_GE(tree.merges[m].height, tree.merges[m - 1].height);
    const auto a = cut(tree, 4);
    EXPECT_EQ(a[0], a[1]);
    EXPECT_EQ(a[2], a[3]);
    EXPECT_EQ(a[4], a[5]);
    EXPECT_EQ(a[6], a[7]);
    EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 4u);
    EXPECT_EQ(cut(tree, 1), std::vector<std::size_t>(8, 0));
    EXPECT_THROW(cut(tree, 9), DomainError);
}

TEST(Cluster, CompleteLinkageHeight) {
    // Two tight pairs far apart: the final merge height is the largest cross distance.
    HellingerMatrix m{default_labels(4), 4, {0, 0.1, 0.5, 0.7, 0.1, 0, 0.6, 0.4, 0.5, 0.6, 0, 0.2, 0.7, 0.4, 0.2, 0}};
    const auto tree = agglomerative_cluster(m);
    EXPECT_DOUBLE_EQ(tree.merges.back().height, 0.7);
}

TEST(Cluster, TieBreakIsLexicographic) {
    HellingerMatrix m{default_labels(3), 3, {0, 0.3, 0.3, 0.3, 0, 0.3, 0.3, 0.3, 0}};
    const auto tree = agglomerative_cluster(m);
    EXPECT_EQ(tree.merges[0].left, 0u);
    EXPECT_EQ(tree.merges[0].right, 1u);
}

TEST(Labels, DescendingMeanScoreAndShare) {
    const auto posts = eight_products();
    const auto scores = complexity_scores(posts);
    const auto a = cut(agglomerative_cluster(distance_matrix(posts)), 4);
    const auto labels = label_clusters(a, scores, {200, 170, 50, 48, 100, 99, 98, 101});
    ASSERT_EQ(labels.size(), 4u);
    EXPECT_EQ(labels[0].letter, "A");
    EXPECT_EQ(labels[0].members, (std::vector<std::size_t>{2, 3}));
    double share = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) {
            EXPECT_LE(labels[i].mean_score, labels[i - 1].mean_score);
        }
        share += labels[i].business_share.value();
    }
    EXPECT_NEAR(share, 1.0, 1e-12);
    EXPECT_EQ(cluster_letter(25), "Z");
    EXPECT_EQ(cluster_letter(26), "AA");
}

#pragma once

// Product complexity from quality performance: Hellinger distances between
// Beta posteriors, cumulative complexity scores on a 0-10 scale, and
// complete-linkage agglomerative clustering of the distance matrix.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bayesqc/beta.hpp"
#include "bayesqc/error.hpp"

namespace bayesqc::complexity {

// Closed form between two Betas:
//   H = sqrt(1 - B((a1+a2)/2, (b1+b2)/2) / sqrt(B(a1,b1) B(a2,b2)))
// The Bhattacharyya coefficient is evaluated in log space and clamped to
// [0,1] so rounding never produces a negative radicand.
inline double hellinger(const BetaParams& p, const BetaParams& q) {
    p.validate();
    q.validate();
    if (p == q) return 0.0;
    const double log_bc =
        log_beta(0.5 * (p.a + q.a), 0.5 * (p.b + q.b)) - 0.5 * (log_beta(p.a, p.b) + log_beta(q.a, q.b));
    const double bc = std::clamp(std::exp(log_bc), 0.0, 1.0);
    return std::sqrt(1.0 - bc);
}

struct HellingerMatrix {
    std::vector<std::string> labels;
    std::size_t size = 0;
    std::vector<double> entries;  // row-major

    double operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

inline std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(std::to_string(i));
    return out;
}

inline HellingerMatrix distance_matrix(const std::vector<BetaParams>& posteriors,
                                       std::vector<std::string> labels = {}) {
    if (posteriors.empty()) throw DomainError("distance_matrix: no posteriors");
    const std::size_t n = posteriors.size();
    if (labels.empty()) labels = default_labels(n);
    if (labels.size() != n) throw DomainError("distance_matrix: label count does not match posterior count");
    HellingerMatrix m{std::move(labels), n, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double h = hellinger(posteriors[i], posteriors[j]);
            m.entries[i * n + j] = h;
            m.entries[j * n + i] = h;
        }
    return m;
}

inline double posterior_median(const BetaParams& p) { return beta_quantile(0.5, p); }

// Indices ascending by posterior median; equal medians fall back to the
// smaller Beta variance, then to input position.
inline std::vector<std::size_t> complexity_order(const std::vector<BetaParams>& posteriors) {
    std::vector<double> med(posteriors.size());
    for (std::size_t i = 0; i < posteriors.size(); ++i) med[i] = posterior_median(posteriors[i]);
    std::vector<std::size_t> idx(posteriors.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
        if (med[l] != med[r]) return med[l] < med[r];
        return posteriors[l].variance() < posteriors[r].variance();
    });
    return idx;
}

struct ComplexityScore {
    std::size_t index = 0;  // position in the input list
    std::string label;
    double raw_score = 0.0;
    double scaled_score = 0.0;
    double median = 0.0;
};

// Scores in complexity order: the least complex product seeds at 0 and each
// next product adds its Hellinger distance to the previous one. Scaled
// linearly so the maximum is 10.
inline std::vector<ComplexityScore> complexity_scores(const std::vector<BetaParams>& posteriors,
                                                      std::vector<std::string> labels = {}) {
    if (posteriors.empty()) throw DomainError("complexity_scores: no posteriors");
    if (labels.empty()) labels = default_labels(posteriors.size());
    if (labels.size() != posteriors.size()) throw DomainError("complexity_scores: label count mismatch");
    const auto order = complexity_order(posteriors);
    std::vector<ComplexityScore> out;
    out.reserve(order.size());
    double raw = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (k > 0) raw += hellinger(posteriors[i], posteriors[order[k - 1]]);
        out.push_back({i, labels[i], raw, 0.0, posterior_median(posteriors[i])});
    }
    const double top = out.back().raw_score;
    for (auto& s : out) s.scaled_score = top > 0.0 ? 10.0 * s.raw_score / top : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Complete-linkage agglomerative clustering

// Leaves are clusters 0..N-1; merge m creates cluster N+m.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
    std::vector<std::size_t> members;  // leaf indices, ascending
};

struct ClusterTree {
    std::size_t leaves = 0;
    std::vector<Merge> merges;
};

// At each step merges the pair of active clusters with the smallest
// complete-linkage distance (largest pairwise member distance). Equal
// distances go to the lexicographically smallest (min id, max id) pair.
inline ClusterTree agglomerative_cluster(const HellingerMatrix& matrix) {
    const std::size_t n = matrix.size;
    if (n == 0) throw DomainError("agglomerative_cluster: empty matrix");
    ClusterTree tree{n, {}};
    tree.merges.reserve(n - 1);

    // Linkage distances between active clusters, indexed by cluster id.
    const std::size_t total = 2 * n - 1;
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = matrix(i, j);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> members(total);
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t x = 0; x < active.size(); ++x)
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const std::size_t lo = std::min(active[x], active[y]);
                const std::size_t hi = std::max(active[x], active[y]);
                const double d = dist[lo][hi];
                if (d < best || (d == best && std::pair{lo, hi} < std::pair{bi, bj})) {
                    best = d;
                    bi = lo;
                    bj = hi;
                }
            }
        const std::size_t id = n + step;
        members[id] = members[bi];
        members[id].insert(members[id].end(), members[bj].begin(), members[bj].end());
        std::sort(members[id].begin(), members[id].end());
        std::erase_if(active, [&](std::size_t c) { return c == bi || c == bj; });
        for (std::size_t c : active) {
            const double d = std::max(dist[std::min(c, bi)][std::max(c, bi)], dist[std::min(c, bj)][std::max(c, bj)]);
            dist[c][id] = d;
            dist[id][c] = d;
        }
        active.push_back(id);
        tree.merges.push_back({bi, bj, best, members[id]});
    }
    return tree;
}

// Cluster id per leaf (0-based, numbered by first appearance in leaf
// order) after undoing the last k-1 merges.
inline std::vector<std::size_t> cut(const ClusterTree& tree, std::size_t k) {
    const std::size_t n = tree.leaves;
    if (k < 1 || k > n) throw DomainError("cut: k must lie in [1, N]");
    // Union-find over the first n-k merges.
    std::vector<std::size_t> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t m = 0; m < n - k; ++m) {
        const std::size_t id = n + m;
        parent[find(tree.merges[m].left)] = id;
        parent[find(tree.merges[m].right)] = id;
    }
    std::vector<std::size_t> assignment(n);
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = find(i);
        auto it = std::find(seen.begin(), seen.end(), root);
        if (it == seen.end()) {
            assignment[i] = seen.size();
            seen.push_back(root);
        } else {
            assignment[i] = static_cast<std::size_t>(it - seen.begin());
        }
    }
    return assignment;
}

inline std::string cluster_letter(std::size_t index) {
    std::string s;
    for (std::size_t v = index + 1; v > 0; v = (v - 1) / 26) s.insert(s.begin(), static_cast<char>('A' + (v - 1) % 26));
    return s;
}

struct ClusterLabel {
    std::string letter;                  // A, B, ..., Z, AA, AB, ...
    std::size_t cluster = 0;             // id from cut()
    std::vector<std::size_t> members;    // input indices
    double mean_score = 0.0;
    std::optional<double> business_share;  // fraction of total welds
};

// Labels clusters A, B, ... by descending mean scaled score. When per-product
// total weld counts are given, each cluster also reports its share of them.
inline std::vector<ClusterLabel> label_clusters(const std::vector<std::size_t>& assignments,
                                                const std::vector<ComplexityScore>& scores,
                                                const std::vector<double>& totals = {}) {
    if (scores.size() != assignments.size()) throw DomainError("label_clusters: scores and assignments differ in size");
    if (!totals.empty() && totals.size() != assignments.size())
        throw DomainError("label_clusters: totals and assignments differ in size");
    std::vector<double> scaled(assignments.size(), 0.0);
    for (const auto& s : scores) {
        if (s.index >= scaled.size()) throw DomainError("label_clusters: score index out of range");
        scaled[s.index] = s.scaled_score;
    }
    const std::size_t k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
    std::vector<ClusterLabel> out(k);
    for (std::size_t c = 0; c < k; ++c) out[c].cluster = c;
    for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].members.push_back(i);
    const double grand = std::accumulate(totals.begin(), totals.end(), 0.0);
    for (auto& c : out) {
        double s = 0.0;
        double t = 0.0;
        for (std::size_t i : c.members) {
            s += scaled[i];
            if (!totals.empty()) t += totals[i];
        }
        c.mean_score = c.members.empty() ? 0.0 : s / static_cast<double>(c.members.size());
        if (!totals.empty() && grand > 0.0) c.business_share = t / grand;
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ClusterLabel& l, const ClusterLabel& r) { return l.mean_score > r.mean_score; });
    for (std::size_t c = 0; c < out.size(); ++c) out[c].letter = cluster_letter(c);
    return out;
}

}  // namespace bayesqc::complexity

#pragma once

// Text and JSON serialization for every result type. Numbers in delimited
// text are fixed at 6 decimals; nothing time-dependent is written, so a
// rerun with the same configuration reproduces a file byte for byte.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bayesqc/ab_test.hpp"
#include "bayesqc/beta.hpp"
#include "bayesqc/complexity.hpp"
#include "bayesqc/forecast.hpp"
#include "bayesqc/ingest.hpp"
#include "bayesqc/mcmc.hpp"
#include "bayesqc/rework.hpp"
#include "bayesqc/stats.hpp"
#include "bayesqc/version.hpp"

namespace bayesqc::report {

using nlohmann::json;

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

// Output header shared by all report files.
struct Provenance {
    std::string command;
    json config = json::object();

    json to_json() const { return {{"command", command}, {"config", config}, {"version", kVersion}}; }

    // '#'-prefixed lines for delimited files.
    void write_comment(std::ostream& os) const {
        os << "# command: " << command << '\n';
        os << "# config: " << config.dump() << '\n';
        os << "# version: " << kVersion << '\n';
    }
};

// Joins already-formatted cells, quoting any that contain the delimiter.
inline void write_row(std::ostream& os, const std::vector<std::string>& cells, char delim = ',') {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << delim;
        const auto& c = cells[i];
        if (c.find(delim) != std::string::npos || c.find('"') != std::string::npos) {
            os << '"';
            for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
            os << '"';
        } else {
            os << c;
        }
    }
    os << '\n';
}

// ---------------------------------------------------------------------------
// ingest

inline void write_summaries(std::ostream& os, const std::vector<ingest::GroupSummary>& rows, char delim = ',',
                            bool with_operator = false) {
    std::vector<std::string> head{"nps", "schedule", "material", "weld_kind"};
    if (with_operator) head.push_back("operator_id");
    head.insert(head.end(), {"total_welds", "inspected_welds", "repaired_welds"});
    write_row(os, head, delim);
    for (const auto& s : rows) {
        std::vector<std::string> r{s.key.nps, s.key.schedule, s.key.material, s.key.weld_kind};
        if (with_operator) r.push_back(s.key.operator_id);
        r.insert(r.end(), {std::to_string(s.total_welds), std::to_string(s.inspected_welds),
                           std::to_string(s.repaired_welds)});
        write_row(os, r, delim);
    }
}

inline json to_json(const ingest::GroupKey& k) {
    json j{{"nps", k.nps}, {"schedule", k.schedule}, {"material", k.material}, {"weld_kind", k.weld_kind}};
    if (!k.operator_id.empty()) j["operator_id"] = k.operator_id;
    return j;
}

inline json to_json(const ingest::GroupSummary& s) {
    return {{"key", to_json(s.key)},
            {"total_welds", s.total_welds},
            {"inspected_welds", s.inspected_welds},
            {"repaired_welds", s.repaired_welds}};
}

inline json to_json(const std::vector<ingest::GroupSummary>& rows) {
    json arr = json::array();
    for (const auto& s : rows) arr.push_back(to_json(s));
    return arr;
}

inline void write_rejections(std::ostream& os, const ingest::CleanReport& report,
                             const std::vector<ingest::RowIssue>& parse_issues, char delim = ',') {
    write_row(os, {"line", "reason"}, delim);
    for (const auto& i : parse_issues)
        if (i.message.rfind("invalid inspection_status", 0) != 0) write_row(os, {std::to_string(i.line), i.message}, delim);
    for (const auto& r : report.rejected) write_row(os, {std::to_string(r.line), r.reason}, delim);
}

// ---------------------------------------------------------------------------
// intervals and chains

inline json to_json(const Interval& iv) {
    return {{"lower", iv.lower}, {"upper", iv.upper}, {"level", iv.level}};
}

inline json to_json(const BetaParams& p) { return {{"a", p.a}, {"b", p.b}}; }

inline void write_trace(std::ostream& os, std::span<const double> draws) {
    write_row(os, {"iteration", "value"});
    for (std::size_t i = 0; i < draws.size(); ++i) write_row(os, {std::to_string(i + 1), fixed6(draws[i])});
}

inline void write_acf(std::ostream& os, const std::vector<double>& values) {
    write_row(os, {"lag", "value"});
    for (std::size_t k = 0; k < values.size(); ++k) write_row(os, {std::to_string(k), fixed6(values[k])});
}

struct OperatorRow {
    std::string operator_id;
    ingest::GroupSummary summary;
    BetaParams posterior;
    double theoretical_median = 0.0;
    mcmc::FiveNumber five;
    double acceptance_rate = 0.0;
};

inline void write_operator_table(std::ostream& os, const std::vector<OperatorRow>& rows, char delim = ',') {
    write_row(os,
              {"rank", "operator_id", "inspected_welds", "repaired_welds", "posterior_a", "posterior_b",
               "theoretical_median", "min", "whisker_low", "q1", "median", "q3", "whisker_high", "max", "outliers",
               "acceptance_rate"},
              delim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        write_row(os,
                  {std::to_string(i + 1), r.operator_id, std::to_string(r.summary.inspected_welds),
                   std::to_string(r.summary.repaired_welds), fixed6(r.posterior.a), fixed6(r.posterior.b),
                   fixed6(r.theoretical_median), fixed6(r.five.min), fixed6(r.five.whisker_low), fixed6(r.five.q1),
                   fixed6(r.five.median), fixed6(r.five.q3), fixed6(r.five.whisker_high), fixed6(r.five.max),
                   std::to_string(r.five.outliers.size()), fixed6(r.acceptance_rate)},
                  delim);
    }
}

// Square matrix with identifiers as row and column headers.
inline void write_labelled_matrix(std::ostream& os, const std::vector<std::string>& labels,
                                  const std::vector<double>& row_major, const std::string& corner, char delim = ',') {
    const std::size_t n = labels.size();
    std::vector<std::string> head{corner};
    head.insert(head.end(), labels.begin(), labels.end());
    write_row(os, head, delim);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> r{labels[i]};
        for (std::size_t j = 0; j < n; ++j) r.push_back(fixed6(row_major[i * n + j]));
        write_row(os, r, delim);
    }
}

// ---------------------------------------------------------------------------
// complexity

inline void write_scores(std::ostream& os, const std::vector<complexity::ComplexityScore>& scores,
                         const std::vector<BetaParams>& posteriors, char delim = ',') {
    write_row(os, {"rank", "product", "posterior_a", "posterior_b", "median", "raw_score", "scaled_score"}, delim);
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const auto& s = scores[k];
        write_row(os,
                  {std::to_string(k + 1), s.label, fixed6(posteriors[s.index].a), fixed6(posteriors[s.index].b),
                   fixed6(s.median), fixed6(s.raw_score), fixed6(s.scaled_score)},
                  delim);
    }
}

// Leaf order that keeps every merge's members contiguous (left subtree
// first), as drawn in a dendrogram.
inline std::vector<std::size_t> leaf_order(const complexity::ClusterTree& tree) {
    const std::size_t n = tree.leaves;
    if (n == 1) return {0};
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{n + tree.merges.size() - 1};
    while (!stack.empty()) {
        const std::size_t id = stack.back();
        stack.pop_back();
        if (id < n) {
            out.push_back(id);
        } else {
            const auto& m = tree.merges[id - n];
            stack.push_back(m.right);
            stack.push_back(m.left);
        }
    }
    return out;
}

struct Segment {
    double x0, y0, x1, y1;
};

// Plot-ready dendrogram: leaves at x = 0..N-1 (in leaf_order), y = height.
inline std::vector<Segment> dendrogram_segments(const complexity::ClusterTree& tree) {
    const std::size_t n = tree.leaves;
    std::vector<double> x(n + tree.merges.size(), 0.0);
    std::vector<double> y(n + tree.merges.size(), 0.0);
    const auto order = leaf_order(tree);
    for (std::size_t pos = 0; pos < order.size(); ++pos) x[order[pos]] = static_cast<double>(pos);
    std::vector<Segment> segs;
    for (std::size_t m = 0; m < tree.merges.size(); ++m) {
        const auto& mg = tree.merges[m];
        const std::size_t id = n + m;
        y[id] = mg.height;
        x[id] = 0.5 * (x[mg.left] + x[mg.right]);
        segs.push_back({x[mg.left], y[mg.left], x[mg.left], mg.height});
        segs.push_back({x[mg.right], y[mg.right], x[mg.right], mg.height});
        segs.push_back({x[mg.left], mg.height, x[mg.right], mg.height});
    }
    return segs;
}

inline json to_json(const complexity::ClusterTree& tree, const std::vector<std::string>& labels) {
    json merges = json::array();
    for (const auto& m : tree.merges) {
        json members = json::array();
        for (std::size_t i : m.members) members.push_back(labels[i]);
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"members", members}});
    }
    json segs = json::array();
    for (const auto& s : dendrogram_segments(tree)) segs.push_back({s.x0, s.y0, s.x1, s.y1});
    json leaves = json::array();
    for (std::size_t i : leaf_order(tree)) leaves.push_back(labels[i]);
    return {{"leaves", labels}, {"leaf_order", leaves}, {"merges", merges}, {"segments", segs}};
}

// Indented text rendering, root first.
inline std::string render_tree_text(const complexity::ClusterTree& tree, const std::vector<std::string>& labels) {
    const std::size_t n = tree.leaves;
    std::ostringstream os;
    struct Item {
        std::size_t id;
        int depth;
    };
    std::vector<Item> stack{{n + tree.merges.size() - 1, 0}};
    while (!stack.empty()) {
        const auto [id, depth] = stack.back();
        stack.pop_back();
        os << std::string(static_cast<std::size_t>(depth) * 2, ' ');
        if (id < n) {
            os << "- " << labels[id] << '\n';
        } else {
            const auto& m = tree.merges[id - n];
            os << "+ height " << fixed6(m.height) << " (" << m.members.size() << " members)\n";
            stack.push_back({m.right, depth + 1});
            stack.push_back({m.left, depth + 1});
        }
    }
    return os.str();
}

inline void write_cluster_labels(std::ostream& os, const std::vector<complexity::ClusterLabel>& clusters,
                                 const std::vector<std::string>& labels, char delim = ',') {
    write_row(os, {"cluster", "members", "mean_score", "business_share"}, delim);
    for (const auto& c : clusters) {
        std::string mem;
        for (std::size_t i = 0; i < c.members.size(); ++i) mem += (i ? " " : "") + labels[c.members[i]];
        write_row(os, {c.letter, mem, fixed6(c.mean_score), c.business_share ? fixed6(*c.business_share) : ""}, delim);
    }
}

// ---------------------------------------------------------------------------
// forecast and rework

inline std::string percent_label(double level) { return std::to_string(static_cast<int>(std::lround(level * 100))) + "%"; }

inline void write_quantile_row(std::ostream& os, const std::vector<QuantileRow>& q, const std::string& row_name,
                               char delim = ',') {
    std::vector<std::string> head{"quantiles"};
    std::vector<std::string> row{row_name};
    for (const auto& r : q) {
        head.push_back(percent_label(r.level));
        row.push_back(fixed6(r.value));
    }
    write_row(os, head, delim);
    write_row(os, row, delim);
}

inline json to_json(const std::vector<QuantileRow>& q) {
    json j = json::object();
    for (const auto& r : q) j[percent_label(r.level)] = r.value;
    return j;
}

inline json to_json(const forecast::ForecastResult& r, bool with_samples) {
    json j{{"iterations", r.iterations},
           {"seed", r.seed},
           {"mode", r.mode == forecast::Mode::PerWeldAverage ? "per_weld_average" : "mixture"},
           {"mean", mean(r.samples)},
           {"quantiles", to_json(r.quantiles)}};
    if (with_samples) j["samples"] = r.samples;
    return j;
}

inline void write_samples(std::ostream& os, std::span<const double> samples) {
    write_row(os, {"iteration", "value"});
    for (std::size_t i = 0; i < samples.size(); ++i) write_row(os, {std::to_string(i + 1), fixed6(samples[i])});
}

inline json to_json(const rework::ReworkEstimate& e) {
    return {{"seed", e.seed}, {"iterations", e.samples.size()}, {"mean", e.mean}, {"quantiles", to_json(e.quantiles)}};
}

inline json to_json(const rework::ControlChartSeries& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back({{"state", p.state},
                       {"median", p.median},
                       {"low", p.band_low},
                       {"high", p.band_high},
                       {"accrued_actual", p.accrued_actual},
                       {"flag", rework::to_string(p.flag)}});
    const double last = c.points.empty() ? 0.0 : static_cast<double>(c.points.back().state);
    auto line = [&](double v) { return json::array({json::array({0.0, v}), json::array({last, v})}); };
    return {{"limits", {{"cl", c.limits.cl}, {"ucl", c.limits.ucl}, {"lcl", c.limits.lcl}}},
            {"points", pts},
            {"lines", {{"cl", line(c.limits.cl)}, {"ucl", line(c.limits.ucl)}, {"lcl", line(c.limits.lcl)}}}};
}

inline void write_control_chart(std::ostream& os, const rework::ControlChartSeries& c, char delim = ',') {
    write_row(os, {"state", "median", "low", "high", "accrued_actual", "cl", "ucl", "lcl", "flag"}, delim);
    for (const auto& p : c.points)
        write_row(os,
                  {std::to_string(p.state), fixed6(p.median), fixed6(p.band_low), fixed6(p.band_high),
                   fixed6(p.accrued_actual), fixed6(c.limits.cl), fixed6(c.limits.ucl), fixed6(c.limits.lcl),
                   rework::to_string(p.flag)},
                  delim);
}

}  // namespace bayesqc::report

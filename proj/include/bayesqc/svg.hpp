#pragma once

// Bare-bones SVG renderings of the report data. They exist to eyeball a run,
// not to reproduce any particular figure style.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "bayesqc/complexity.hpp"
#include "bayesqc/mcmc.hpp"
#include "bayesqc/report.hpp"
#include "bayesqc/rework.hpp"

namespace bayesqc::svg {

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Plot area with a linear data -> pixel mapping.
struct Frame {
    double width = 720, height = 420, margin = 50;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    double px(double x) const { return margin + (x - x_min) / (x_max - x_min) * (width - 2 * margin); }
    double py(double y) const { return height - margin - (y - y_min) / (y_max - y_min) * (height - 2 * margin); }

    std::string open(const std::string& title) const {
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
           << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
           << "</text>\n"
           << line(x_min, y_min, x_max, y_min, "black") << line(x_min, y_min, x_min, y_max, "black");
        for (int t = 0; t <= 4; ++t) {
            const double v = y_min + (y_max - y_min) * t / 4.0;
            os << "<text x=\"" << num(margin - 4) << "\" y=\"" << num(py(v) + 4) << "\" text-anchor=\"end\">"
               << num(v) << "</text>\n";
        }
        return os.str();
    }

    std::string line(double x0, double y0, double x1, double y1, const std::string& stroke,
                     const std::string& extra = "") const {
        return "<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(y0)) + "\" x2=\"" + num(px(x1)) + "\" y2=\"" +
               num(py(y1)) + "\" stroke=\"" + stroke + "\" " + extra + "/>\n";
    }

    std::string label(double x, double y, const std::string& text, const std::string& anchor = "middle") const {
        return "<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y)) + "\" text-anchor=\"" + anchor + "\">" +
               escape(text) + "</text>\n";
    }
};

inline void pad_range(double& lo, double& hi) {
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
}

}  // namespace detail

struct Box {
    std::string label;
    mcmc::FiveNumber five;
};

inline std::string boxplots(const std::vector<Box>& boxes, const std::string& title) {
    detail::Frame f;
    f.x_min = 0;
    f.x_max = static_cast<double>(boxes.size()) + 1;
    f.y_min = 1e300;
    f.y_max = -1e300;
    for (const auto& b : boxes) {
        f.y_min = std::min(f.y_min, b.five.whisker_low);
        f.y_max = std::max(f.y_max, b.five.whisker_high);
        for (double o : b.five.outliers) {
            f.y_min = std::min(f.y_min, o);
            f.y_max = std::max(f.y_max, o);
        }
    }
    if (boxes.empty()) f.y_min = 0, f.y_max = 1;
    detail::pad_range(f.y_min, f.y_max);
    std::string s = f.open(title);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const double x = static_cast<double>(i) + 1;
        const auto& v = boxes[i].five;
        s += f.line(x, v.whisker_low, x, v.q1, "black") + f.line(x, v.q3, x, v.whisker_high, "black");
        const double w = 0.3;
        s += "<rect x=\"" + detail::num(f.px(x - w)) + "\" y=\"" + detail::num(f.py(v.q3)) + "\" width=\"" +
             detail::num(f.px(x + w) - f.px(x - w)) + "\" height=\"" + detail::num(f.py(v.q1) - f.py(v.q3)) +
             "\" fill=\"#cfe0f3\" stroke=\"black\"/>\n";
        s += f.line(x - w, v.median, x + w, v.median, "black", "stroke-width=\"2\"");
        for (double o : v.outliers)
            s += "<circle cx=\"" + detail::num(f.px(x)) + "\" cy=\"" + detail::num(f.py(o)) +
                 "\" r=\"1.5\" fill=\"none\" stroke=\"gray\"/>\n";
        s += "<text x=\"" + detail::num(f.px(x)) + "\" y=\"" + detail::num(f.height - f.margin + 14) +
             "\" text-anchor=\"middle\">" + detail::escape(boxes[i].label) + "</text>\n";
    }
    return s + "</svg>\n";
}

inline std::string histogram(const std::vector<double>& samples, const std::string& title, std::size_t bins = 20) {
    detail::Frame f;
    if (samples.empty() || bins == 0) return f.open(title) + "</svg>\n";
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    double lo = *mn;
    double hi = *mx;
    if (hi <= lo) hi = lo + 1e-9;
    std::vector<std::size_t> counts(bins, 0);
    for (double v : samples) {
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        counts[std::min(b, bins - 1)] += 1;
    }
    f.x_min = lo;
    f.x_max = hi;
    f.y_min = 0;
    f.y_max = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
    std::string s = f.open(title);
    const double bw = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double x0 = lo + bw * static_cast<double>(b);
        s += "<rect x=\"" + detail::num(f.px(x0)) + "\" y=\"" + detail::num(f.py(static_cast<double>(counts[b]))) +
             "\" width=\"" + detail::num(f.px(x0 + bw) - f.px(x0)) + "\" height=\"" +
             detail::num(f.py(0) - f.py(static_cast<double>(counts[b]))) + "\" fill=\"#9fbfdf\" stroke=\"white\"/>\n";
    }
    s += f.label(lo, f.y_min, report::fixed6(lo), "start") + f.label(hi, f.y_min, report::fixed6(hi), "end");
    return s + "</svg>\n";
}

inline std::string control_chart(const rework::ControlChartSeries& c, const std::string& title) {
    detail::Frame f;
    f.x_min = -0.5;
    f.x_max = c.points.empty() ? 1.0 : static_cast<double>(c.points.back().state) + 0.5;
    f.y_min = std::min(0.0, c.limits.lcl);
    f.y_max = c.limits.ucl;
    for (const auto& p : c.points) f.y_max = std::max(f.y_max, p.band_high);
    detail::pad_range(f.y_min, f.y_max);
    std::string s = f.open(title);
    s += f.line(f.x_min, c.limits.cl, f.x_max, c.limits.cl, "green") +
         f.line(f.x_min, c.limits.ucl, f.x_max, c.limits.ucl, "red", "stroke-dasharray=\"4\"") +
         f.line(f.x_min, c.limits.lcl, f.x_max, c.limits.lcl, "red", "stroke-dasharray=\"4\"");
    for (const auto& p : c.points) {
        const double x = static_cast<double>(p.state);
        s += f.line(x, p.band_low, x, p.band_high, "gray");
        const char* colour = p.flag == rework::Flag::AboveUcl ? "red" : "black";
        s += "<circle cx=\"" + detail::num(f.px(x)) + "\" cy=\"" + detail::num(f.py(p.median)) + "\" r=\"3\" fill=\"" +
             colour + "\"/>\n";
        s += "<text x=\"" + detail::num(f.px(x)) + "\" y=\"" + detail::num(f.height - f.margin + 14) +
             "\" text-anchor=\"middle\">" + std::to_string(p.state) + "</text>\n";
    }
    return s + "</svg>\n";
}

inline std::string dendrogram(const complexity::ClusterTree& tree, const std::vector<std::string>& labels,
                              const std::string& title) {
    detail::Frame f;
    f.x_min = -1;
    f.x_max = static_cast<double>(tree.leaves);
    f.y_min = 0;
    f.y_max = tree.merges.empty() ? 1.0 : tree.merges.back().height;
    detail::pad_range(f.y_min, f.y_max);
    std::string s = f.open(title);
    for (const auto& seg : report::dendrogram_segments(tree)) s += f.line(seg.x0, seg.y0, seg.x1, seg.y1, "black");
    const auto order = report::leaf_order(tree);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        s += "<text x=\"" + detail::num(f.px(static_cast<double>(pos))) + "\" y=\"" +
             detail::num(f.height - f.margin + 14) + "\" text-anchor=\"middle\">" + detail::escape(labels[order[pos]]) +
             "</text>\n";
    return s + "</svg>\n";
}

}  // namespace bayesqc::svg

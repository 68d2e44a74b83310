#pragma once

// Monte Carlo forecast of a project's fraction nonconforming from the
// posteriors of the weld types it contains.

#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bayesqc/beta.hpp"
#include "bayesqc/error.hpp"
#include "bayesqc/ingest.hpp"
#include "bayesqc/rng.hpp"
#include "bayesqc/stats.hpp"

namespace bayesqc::forecast {

inline constexpr std::size_t kDefaultIterations = 100;

// `count` welds of one type.
struct DesignEntry {
    ingest::GroupKey key;
    std::uint64_t count = 0;
};

struct TypeComponent {
    ingest::GroupKey key;
    BetaParams posterior;
    std::uint64_t count = 0;
};

struct ProjectDesign {
    std::vector<TypeComponent> components;

    std::uint64_t total_welds() const {
        std::uint64_t n = 0;
        for (const auto& c : components) n += c.count;
        return n;
    }
    std::size_t type_count() const { return components.size(); }
};

using PosteriorTable = std::map<ingest::GroupKey, BetaParams>;

inline PosteriorTable posterior_table(const std::vector<ingest::GroupSummary>& history,
                                      const BetaParams& prior = BetaParams::jeffreys()) {
    PosteriorTable t;
    for (const auto& s : history) t[s.key] = posterior({s.repaired_welds, s.inspected_welds}, prior);
    return t;
}

// Maps every design entry to its type posterior. An entry with no history is
// a ConfigError naming the key.
inline ProjectDesign resolve_design(const std::vector<DesignEntry>& entries, const PosteriorTable& table) {
    ProjectDesign d;
    for (const auto& e : entries) {
        if (e.count == 0) continue;
        auto it = table.find(e.key);
        if (it == table.end()) throw ConfigError("no inspection history for weld type " + e.key.label());
        d.components.push_back({e.key, it->second, e.count});
    }
    if (d.total_welds() == 0) throw ConfigError("project design contains no welds");
    return d;
}

// Design file: nps, schedule, material, weld_kind, count. Grouping columns
// that are absent stay empty, matching a history summarized without them.
inline std::vector<DesignEntry> parse_design(std::istream& in, const ingest::Schema& schema = {}) {
    const auto t = ingest::read_table(in, schema);
    const std::size_t c_count = t.require("count");
    const auto c_nps = t.column("nps");
    const auto c_sched = t.column("schedule");
    const auto c_mat = t.column("material");
    const auto c_kind = t.column("weld_kind");
    std::vector<DesignEntry> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        DesignEntry e;
        if (c_nps) e.key.nps = ingest::normalize_nps(t.rows[r][*c_nps]);
        if (c_sched) e.key.schedule = t.rows[r][*c_sched];
        if (c_mat) e.key.material = t.rows[r][*c_mat];
        if (c_kind) e.key.weld_kind = t.rows[r][*c_kind];
        e.count = ingest::count_field(t, r, c_count);
        out.push_back(std::move(e));
    }
    return out;
}

enum class Mode {
    // Every weld draws its own p_i; the project value is their average.
    PerWeldAverage,
    // One weld type is picked per iteration (weighted by count) and a single
    // p is drawn from it: a literal mixture of the type posteriors.
    Mixture,
};

struct ForecastResult {
    std::vector<double> samples;
    std::vector<QuantileRow> quantiles;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    Mode mode = Mode::PerWeldAverage;
};

inline std::vector<QuantileRow> quantile_table(const ForecastResult& result, double step = 0.1) {
    if (result.samples.empty()) throw DomainError("quantile_table: no samples");
    return quantile_grid(result.samples, step);
}

// Iteration i uses stream i, so iterations are independent of each other and
// of evaluation order. Within an iteration, welds draw in design order.
inline ForecastResult simulate_project(const ProjectDesign& design, std::size_t iterations = kDefaultIterations,
                                       std::uint64_t seed = 1, Mode mode = Mode::PerWeldAverage) {
    if (iterations == 0) throw DomainError("simulate_project: need at least one iteration");
    const std::uint64_t n = design.total_welds();
    if (n == 0) throw ConfigError("project design contains no welds");
    for (const auto& c : design.components) c.posterior.validate();

    ForecastResult r;
    r.seed = seed;
    r.iterations = iterations;
    r.mode = mode;
    r.samples.reserve(iterations);

    std::vector<double> weights;
    for (const auto& c : design.components) weights.push_back(static_cast<double>(c.count));

    for (std::size_t it = 0; it < iterations; ++it) {
        Engine eng = make_engine(seed, it);
        if (mode == Mode::PerWeldAverage) {
            double sum = 0.0;
            for (const auto& c : design.components)
                for (std::uint64_t w = 0; w < c.count; ++w) sum += draw_beta(eng, c.posterior.a, c.posterior.b);
            r.samples.push_back(sum / static_cast<double>(n));
        } else {
            std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
            const auto& c = design.components[pick(eng)];
            r.samples.push_back(draw_beta(eng, c.posterior.a, c.posterior.b));
        }
    }
    r.quantiles = quantile_grid(r.samples, 0.1);
    return r;
}

}  // namespace bayesqc::forecast

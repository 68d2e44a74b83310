#pragma once

// Subcommand bodies for the bayesqc CLI. Each reads its inputs, runs the
// library and writes report files into the output directory.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bayesqc/bayesqc.hpp"

namespace bayesqc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kOutputDirEnv = "BAYESQC_OUTPUT_DIR";

struct RunConfig {
    std::string command;

    // inputs
    std::string input;
    std::string history;
    std::string design;
    std::string specs;
    std::string actuals;

    std::string output_dir;
    std::vector<std::string> formats{"csv", "json", "svg"};
    std::string delimiter = ",";

    // summarize
    std::vector<std::string> group_by{"nps", "schedule", "material", "weld_kind"};
    std::optional<std::string> project_type;

    // interval
    std::optional<std::uint64_t> failed;
    std::optional<std::uint64_t> inspected;
    bool classical = false;

    double prior_a = 0.5;
    double prior_b = 0.5;
    double alpha = 0.05;

    // operators
    std::optional<std::string> nps;
    std::optional<std::string> schedule;
    std::optional<std::string> material;
    std::optional<std::string> weld_kind;
    std::uint64_t min_inspected = 0;
    std::uint64_t chain_iterations = 10000;
    std::uint64_t burn_in = 200;
    double proposal_sd = 0.05;
    std::uint64_t max_lag = 20;
    std::uint64_t resamples = ab::kDefaultResamples;

    // complexity
    std::optional<std::uint64_t> top_n;
    std::uint64_t clusters = 7;

    // forecast / rework; 0 means the command default
    std::uint64_t iterations = 0;
    std::uint64_t seed = 1;
    std::string mode = "per_weld";
    double efficiency = rework::kDefaultEfficiency;
    bool update_posteriors = false;

    BetaParams prior() const { return {prior_a, prior_b}; }
    char delim() const { return delimiter.front(); }
    bool wants(const std::string& fmt) const {
        for (const auto& f : formats)
            if (f == fmt) return true;
        return false;
    }
};

inline json to_json(const RunConfig& c) {
    auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
    return {{"command", c.command},
            {"input", c.input},
            {"history", c.history},
            {"design", c.design},
            {"specs", c.specs},
            {"actuals", c.actuals},
            {"output_dir", c.output_dir},
            {"formats", c.formats},
            {"delimiter", c.delimiter},
            {"group_by", c.group_by},
            {"project_type", opt(c.project_type)},
            {"failed", opt(c.failed)},
            {"inspected", opt(c.inspected)},
            {"classical", c.classical},
            {"prior_a", c.prior_a},
            {"prior_b", c.prior_b},
            {"alpha", c.alpha},
            {"nps", opt(c.nps)},
            {"schedule", opt(c.schedule)},
            {"material", opt(c.material)},
            {"weld_kind", opt(c.weld_kind)},
            {"min_inspected", c.min_inspected},
            {"chain_iterations", c.chain_iterations},
            {"burn_in", c.burn_in},
            {"proposal_sd", c.proposal_sd},
            {"max_lag", c.max_lag},
            {"resamples", c.resamples},
            {"top_n", opt(c.top_n)},
            {"clusters", c.clusters},
            {"iterations", c.iterations},
            {"seed", c.seed},
            {"mode", c.mode},
            {"efficiency", c.efficiency},
            {"update_posteriors", c.update_posteriors}};
}

// Overlays the keys present in `j` onto `c`. Unknown keys and wrong types
// are configuration errors.
inline void apply(RunConfig& c, const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        try {
            auto set_opt = [&](auto& field) {
                using T = typename std::decay_t<decltype(field)>::value_type;
                if (v.is_null())
                    field.reset();
                else
                    field = v.get<T>();
            };
            if (key == "command") c.command = v.get<std::string>();
            else if (key == "input") c.input = v.get<std::string>();
            else if (key == "history") c.history = v.get<std::string>();
            else if (key == "design") c.design = v.get<std::string>();
            else if (key == "specs") c.specs = v.get<std::string>();
            else if (key == "actuals") c.actuals = v.get<std::string>();
            else if (key == "output_dir") c.output_dir = v.get<std::string>();
            else if (key == "formats") c.formats = v.get<std::vector<std::string>>();
            else if (key == "delimiter") c.delimiter = v.get<std::string>();
            else if (key == "group_by") c.group_by = v.get<std::vector<std::string>>();
            else if (key == "project_type") set_opt(c.project_type);
            else if (key == "failed") set_opt(c.failed);
            else if (key == "inspected") set_opt(c.inspected);
            else if (key == "classical") c.classical = v.get<bool>();
            else if (key == "prior_a") c.prior_a = v.get<double>();
            else if (key == "prior_b") c.prior_b = v.get<double>();
            else if (key == "alpha") c.alpha = v.get<double>();
            else if (key == "nps") set_opt(c.nps);
            else if (key == "schedule") set_opt(c.schedule);
            else if (key == "material") set_opt(c.material);
            else if (key == "weld_kind") set_opt(c.weld_kind);
            else if (key == "min_inspected") c.min_inspected = v.get<std::uint64_t>();
            else if (key == "chain_iterations") c.chain_iterations = v.get<std::uint64_t>();
            else if (key == "burn_in") c.burn_in = v.get<std::uint64_t>();
            else if (key == "proposal_sd") c.proposal_sd = v.get<double>();
            else if (key == "max_lag") c.max_lag = v.get<std::uint64_t>();
            else if (key == "resamples") c.resamples = v.get<std::uint64_t>();
            else if (key == "top_n") set_opt(c.top_n);
            else if (key == "clusters") c.clusters = v.get<std::uint64_t>();
            else if (key == "iterations") c.iterations = v.get<std::uint64_t>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "mode") c.mode = v.get<std::string>();
            else if (key == "efficiency") c.efficiency = v.get<double>();
            else if (key == "update_posteriors") c.update_posteriors = v.get<bool>();
            else throw ConfigError("unknown configuration key '" + key + "'");
        } catch (const json::exception&) {
            throw ConfigError("configuration key '" + key + "' has the wrong type");
        }
    }
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

// Fills command-dependent defaults and checks the values every command shares.
inline void finalize(RunConfig& c) {
    if (c.output_dir.empty()) {
        const char* env = std::getenv(kOutputDirEnv);
        c.output_dir = env && *env ? env : ".";
    }
    if (c.iterations == 0) {
        if (c.command == "forecast") c.iterations = forecast::kDefaultIterations;
        if (c.command == "rework") c.iterations = rework::kDefaultIterations;
    }
    if (c.delimiter.size() != 1) throw ConfigError("delimiter must be a single character");
    for (const auto& f : c.formats)
        if (f != "csv" && f != "json" && f != "svg") throw ConfigError("unknown output format '" + f + "'");
    if (c.mode != "per_weld" && c.mode != "mixture") throw ConfigError("mode must be per_weld or mixture");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(c.prior_a > 0.0 && c.prior_b > 0.0)) throw ConfigError("prior shapes must be positive");
}

// ---------------------------------------------------------------------------
// output

// Rounds every float to 6 decimals so JSON reports carry the same precision
// as the delimited ones.
inline void round6(json& j) {
    if (j.is_number_float()) {
        double v = std::round(j.get<double>() * 1e6) / 1e6;
        if (v == 0.0) v = 0.0;
        j = v;
    } else if (j.is_structured()) {
        for (auto& e : j) round6(e);
    }
}

class Output {
public:
    Output(const RunConfig& cfg) : cfg_(cfg), prov_{cfg.command, to_json(cfg)} {}

    const report::Provenance& provenance() const { return prov_; }

    // Temp file + rename so readers never see a half-written report.
    void write(const std::string& name, const std::string& body) {
        const fs::path dir(cfg_.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + dir.string());
        const fs::path target = dir / name;
        const fs::path tmp = dir / ("." + name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw ConfigError("cannot write " + tmp.string());
            out << body;
            if (!out) throw ConfigError("write failed for " + tmp.string());
        }
        fs::rename(tmp, target, ec);
        if (ec) throw ConfigError("cannot move report into place: " + target.string());
        written_.push_back(target.string());
    }

    template <class F>
    void csv(const std::string& name, F&& body) {
        if (!cfg_.wants("csv")) return;
        std::ostringstream os;
        prov_.write_comment(os);
        body(os);
        write(name, os.str());
    }

    void json_file(const std::string& name, json payload) {
        if (!cfg_.wants("json")) return;
        payload["provenance"] = prov_.to_json();
        round6(payload);
        write(name, payload.dump(2) + "\n");
    }

    void svg(const std::string& name, const std::string& doc) {
        if (!cfg_.wants("svg")) return;
        std::ostringstream os;
        os << "<!-- command: " << prov_.command << " -->\n<!-- config: " << prov_.config.dump()
           << " -->\n<!-- version: " << kVersion << " -->\n"
           << doc;
        write(name, os.str());
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    const RunConfig& cfg_;
    report::Provenance prov_;
    std::vector<std::string> written_;
};

// ---------------------------------------------------------------------------
// input helpers

inline std::string slurp(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("no ") + what + " file given");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError(std::string("cannot open ") + what + " file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ingest::GroupBy parse_group_by(const std::vector<std::string>& names) {
    ingest::GroupBy by;
    for (const auto& n : names) {
        if (n == "nps") by.mask |= static_cast<unsigned>(ingest::Field::Nps);
        else if (n == "schedule") by.mask |= static_cast<unsigned>(ingest::Field::Schedule);
        else if (n == "material") by.mask |= static_cast<unsigned>(ingest::Field::Material);
        else if (n == "weld_kind") by.mask |= static_cast<unsigned>(ingest::Field::WeldKind);
        else if (n == "operator_id" || n == "operator") by.mask |= static_cast<unsigned>(ingest::Field::Operator);
        else throw ConfigError("unknown grouping key '" + n + "'");
    }
    if (by.mask == 0) throw ConfigError("group_by needs at least one key");
    return by;
}

struct LoadedSummaries {
    std::vector<ingest::GroupSummary> rows;
    std::vector<std::string> ids;  // type_id column when present, else 1-based row number
};

// Accepts either raw inspection records (summarized with `by`) or an
// already-summarized table.
inline LoadedSummaries load_summaries(const RunConfig& cfg, const std::string& path, ingest::GroupBy by) {
    const std::string text = slurp(path, "input");
    const ingest::Schema schema{cfg.delim()};
    std::istringstream probe(text);
    const auto table = ingest::read_table(probe, schema);
    LoadedSummaries out;
    if (table.column("inspection_status")) {
        std::istringstream in(text);
        auto parsed = ingest::parse_records(in, schema);
        ingest::CleanOptions opts;
        opts.project_type = cfg.project_type;
        out.rows = ingest::summarize(ingest::clean(parsed.records, opts).records, by);
    } else {
        std::istringstream in(text);
        out.rows = ingest::parse_summaries(in, schema);
        if (auto c = table.column("type_id"))
            for (const auto& r : table.rows) out.ids.push_back(r[*c]);
    }
    if (out.ids.size() != out.rows.size()) {
        out.ids.clear();
        for (std::size_t i = 0; i < out.rows.size(); ++i) out.ids.push_back(std::to_string(i + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// commands

inline int cmd_summarize(const RunConfig& cfg, Output& out) {
    const auto by = parse_group_by(cfg.group_by);
    const std::string text = slurp(cfg.input, "input");
    std::istringstream in(text);
    const auto parsed = ingest::parse_records(in, {cfg.delim()});
    ingest::CleanOptions opts;
    opts.project_type = cfg.project_type;
    const auto cleaned = ingest::clean(parsed.records, opts);
    const auto rows = ingest::summarize(cleaned.records, by);

    out.csv("summary.csv", [&](std::ostream& os) {
        report::write_summaries(os, rows, cfg.delim(), by.has(ingest::Field::Operator));
    });
    out.json_file("summary.json", {{"summaries", report::to_json(rows)},
                                   {"records_read", parsed.records.size()},
                                   {"records_kept", cleaned.records.size()}});
    bool bad = !cleaned.report.empty();
    for (const auto& i : parsed.issues)
        if (i.message.rfind("invalid inspection_status", 0) != 0) bad = true;
    if (bad)
        out.csv("rejections.csv",
                [&](std::ostream& os) { report::write_rejections(os, cleaned.report, parsed.issues, cfg.delim()); });
    std::cout << rows.size() << " groups from " << cleaned.records.size() << " records";
    if (bad) std::cout << " (" << cleaned.report.total() << " rejected)";
    std::cout << '\n';
    return 0;
}

inline int cmd_interval(const RunConfig& cfg, Output& out) {
    if (!cfg.failed || !cfg.inspected) throw ConfigError("interval needs --failed and --inspected");
    const CountData counts{*cfg.failed, *cfg.inspected};
    counts.validate();
    const auto post = posterior(counts, cfg.prior());
    const auto iv = credible_interval(post, cfg.alpha);
    json j{{"failed", counts.failed},
           {"inspected", counts.inspected},
           {"prior", report::to_json(cfg.prior())},
           {"posterior", report::to_json(post)},
           {"posterior_mean", post.mean()},
           {"posterior_median", beta_quantile(0.5, post)},
           {"credible_interval", report::to_json(iv)}};
    if (cfg.classical) {
        if (counts.inspected == 0) {
            j["classical"] = nullptr;
        } else {
            j["classical"] = {{"wald", report::to_json(wald_interval(counts, cfg.alpha))},
                              {"wilson", report::to_json(wilson_interval(counts, cfg.alpha))},
                              {"agresti_coull", report::to_json(agresti_coull_interval(counts, cfg.alpha))}};
        }
    }
    out.json_file("interval.json", j);
    json shown = j;
    round6(shown);
    std::cout << shown.dump(2) << '\n';
    return 0;
}

inline int cmd_operators(const RunConfig& cfg, Output& out) {
    const auto loaded = load_summaries(cfg, cfg.input, ingest::GroupBy::pipe_format_by_operator());
    ingest::KeyFilter filter{cfg.nps, cfg.schedule, cfg.material, cfg.weld_kind, std::nullopt};
    const auto groups = ingest::filter_summaries(loaded.rows, filter, cfg.min_inspected);
    if (groups.empty()) throw ConfigError("no operator groups match the filter");

    std::vector<report::OperatorRow> rows;
    std::vector<mcmc::Chain> chains;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        const CountData counts{g.repaired_welds, g.inspected_welds};
        mcmc::ChainConfig cc;
        cc.iterations = cfg.chain_iterations;
        cc.burn_in = cfg.burn_in;
        cc.proposal_sd = cfg.proposal_sd;
        cc.seed = cfg.seed;
        cc.stream = i;
        chains.push_back(mcmc::sample_posterior(counts, cfg.prior(), cc));
        const auto post = posterior(counts, cfg.prior());
        const std::string id = g.key.operator_id.empty() ? g.key.label() : g.key.operator_id;
        rows.push_back({id, g, post, beta_quantile(0.5, post), mcmc::empirical_five_number(chains.back()),
                        chains.back().acceptance_rate()});
    }
    // Worst performer first.
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (rows[l].five.median != rows[r].five.median) return rows[l].five.median > rows[r].five.median;
        return ingest::natural_compare(rows[l].operator_id, rows[r].operator_id) < 0;
    });
    std::vector<report::OperatorRow> ranked;
    std::vector<std::span<const double>> samples;
    std::vector<std::string> ids;
    for (std::size_t i : order) {
        ranked.push_back(rows[i]);
        samples.push_back(chains[i].post_burn_in());
        ids.push_back(rows[i].operator_id);
    }
    const auto matrix = ab::pairwise_matrix(samples, cfg.resamples, cfg.seed);

    out.csv("operators.csv", [&](std::ostream& os) { report::write_operator_table(os, ranked, cfg.delim()); });
    out.csv("ab_matrix.csv",
            [&](std::ostream& os) { report::write_labelled_matrix(os, ids, matrix.values, "operator_id", cfg.delim()); });
    out.csv("acf.csv", [&](std::ostream& os) {
        report::write_row(os, {"operator_id", "lag", "value"}, cfg.delim());
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto a = mcmc::acf(chains[order[k]], cfg.max_lag);
            for (std::size_t lag = 0; lag < a.size(); ++lag)
                report::write_row(os, {ids[k], std::to_string(lag), report::fixed6(a[lag])}, cfg.delim());
        }
    });
    json jrows = json::array();
    for (const auto& r : ranked)
        jrows.push_back({{"operator_id", r.operator_id},
                         {"inspected_welds", r.summary.inspected_welds},
                         {"repaired_welds", r.summary.repaired_welds},
                         {"posterior", report::to_json(r.posterior)},
                         {"theoretical_median", r.theoretical_median},
                         {"five_number",
                          {{"min", r.five.min},
                           {"whisker_low", r.five.whisker_low},
                           {"q1", r.five.q1},
                           {"median", r.five.median},
                           {"q3", r.five.q3},
                           {"whisker_high", r.five.whisker_high},
                           {"max", r.five.max},
                           {"outliers", r.five.outliers.size()}}},
                         {"acceptance_rate", r.acceptance_rate}});
    json jm = json::array();
    for (std::size_t i = 0; i < matrix.size; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < matrix.size; ++j) row.push_back(matrix(i, j));
        jm.push_back(row);
    }
    out.json_file("operators.json", {{"operators", jrows}, {"ab_matrix", {{"ids", ids}, {"values", jm}}}});
    std::vector<svg::Box> boxes;
    for (const auto& r : ranked) boxes.push_back({r.operator_id, r.five});
    out.svg("operators_boxplot.svg", svg::boxplots(boxes, "Fraction nonconforming by operator"));
    std::cout << ranked.size() << " operators ranked\n";
    return 0;
}

inline int cmd_complexity(const RunConfig& cfg, Output& out) {
    auto loaded = load_summaries(cfg, cfg.input, ingest::GroupBy::pipe_format());
    if (loaded.rows.empty()) throw SchemaError("complexity input has no rows");
    // Top n by total welds; ties keep input order.
    std::vector<std::size_t> pick(loaded.rows.size());
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    if (cfg.top_n) {
        if (*cfg.top_n == 0) throw ConfigError("top_n must be at least 1");
        std::stable_sort(pick.begin(), pick.end(), [&](std::size_t l, std::size_t r) {
            return loaded.rows[l].total_welds > loaded.rows[r].total_welds;
        });
        if (pick.size() > *cfg.top_n) pick.resize(*cfg.top_n);
        std::sort(pick.begin(), pick.end());
    }
    std::vector<BetaParams> posts;
    std::vector<std::string> labels;
    std::vector<double> totals;
    for (std::size_t i : pick) {
        const auto& g = loaded.rows[i];
        posts.push_back(posterior({g.repaired_welds, g.inspected_welds}, cfg.prior()));
        const bool keyed = !(g.key == ingest::GroupKey{});
        labels.push_back(keyed ? loaded.ids[i] + "." + g.key.label() : loaded.ids[i]);
        totals.push_back(static_cast<double>(g.total_welds));
    }
    const auto matrix = complexity::distance_matrix(posts, labels);
    const auto scores = complexity::complexity_scores(posts, labels);
    const auto tree = complexity::agglomerative_cluster(matrix);
    const std::size_t k = std::min<std::size_t>(std::max<std::uint64_t>(cfg.clusters, 1), posts.size());
    const auto assignment = complexity::cut(tree, k);
    const auto clusters = complexity::label_clusters(assignment, scores, totals);

    out.csv("complexity_scores.csv", [&](std::ostream& os) { report::write_scores(os, scores, posts, cfg.delim()); });
    out.csv("hellinger.csv",
            [&](std::ostream& os) { report::write_labelled_matrix(os, labels, matrix.entries, "type", cfg.delim()); });
    out.csv("clusters.csv",
            [&](std::ostream& os) { report::write_cluster_labels(os, clusters, labels, cfg.delim()); });
    json jscores = json::array();
    for (const auto& s : scores)
        jscores.push_back({{"type", s.label}, {"median", s.median}, {"raw", s.raw_score}, {"scaled", s.scaled_score}});
    json jclusters = json::array();
    for (const auto& c : clusters) {
        json members = json::array();
        for (std::size_t m : c.members) members.push_back(labels[m]);
        json jc{{"cluster", c.letter}, {"members", members}, {"mean_score", c.mean_score}};
        if (c.business_share) jc["business_share"] = *c.business_share;
        jclusters.push_back(jc);
    }
    out.json_file("dendrogram.json",
                  {{"tree", report::to_json(tree, labels)}, {"k", k}, {"scores", jscores}, {"clusters", jclusters}});
    out.svg("dendrogram.svg", svg::dendrogram(tree, labels, "Complete-linkage dendrogram"));
    std::cout << report::render_tree_text(tree, labels);
    return 0;
}

inline int cmd_forecast(const RunConfig& cfg, Output& out) {
    const std::string htext = slurp(cfg.history, "history");
    std::istringstream hin(htext);
    const auto history = ingest::parse_summaries(hin, {cfg.delim()});
    const std::string dtext = slurp(cfg.design, "design");
    std::istringstream din(dtext);
    const auto entries = forecast::parse_design(din, {cfg.delim()});
    const auto design = forecast::resolve_design(entries, forecast::posterior_table(history, cfg.prior()));
    const auto mode = cfg.mode == "mixture" ? forecast::Mode::Mixture : forecast::Mode::PerWeldAverage;
    const auto result = forecast::simulate_project(design, cfg.iterations, cfg.seed, mode);

    out.csv("forecast_quantiles.csv", [&](std::ostream& os) {
        report::write_quantile_row(os, result.quantiles, "fraction_nonconforming", cfg.delim());
    });
    out.csv("forecast_samples.csv", [&](std::ostream& os) { report::write_samples(os, result.samples); });
    json j = report::to_json(result, false);
    j["total_welds"] = design.total_welds();
    j["weld_types"] = design.type_count();
    out.json_file("forecast.json", j);
    out.svg("forecast_histogram.svg", svg::histogram(result.samples, "Project fraction nonconforming"));
    std::cout << "median " << report::fixed6(empirical_quantile(result.samples, 0.5)) << '\n';
    return 0;
}

inline int cmd_rework(const RunConfig& cfg, Output& out) {
    const std::string stext = slurp(cfg.specs, "specs");
    std::istringstream sin(stext);
    const auto specs = rework::parse_specs(sin, cfg.prior(), cfg.efficiency, {cfg.delim()});
    const auto estimate = rework::simulate_total_rework(specs, cfg.iterations, cfg.seed);
    const auto limits = rework::control_limits(estimate);

    // E[p/(1-p)] = a/(b-1) under Beta(a, b), finite only for b > 1.
    std::optional<double> analytic;
    {
        double s = 0.0;
        bool ok = true;
        for (const auto& p : specs) {
            if (p.posterior.b <= 1.0) ok = false;
            else s += p.efficiency * p.estimated_hours * p.posterior.a / (p.posterior.b - 1.0);
        }
        if (ok) analytic = s;
    }

    out.csv("rework_quantiles.csv",
            [&](std::ostream& os) { report::write_quantile_row(os, estimate.quantiles, "rework_hours", cfg.delim()); });
    out.csv("rework_samples.csv", [&](std::ostream& os) { report::write_samples(os, estimate.samples); });
    json j{{"estimate", report::to_json(estimate)},
           {"limits", {{"cl", limits.cl}, {"ucl", limits.ucl}, {"lcl", limits.lcl}}},
           {"analytic_mean", analytic ? json(*analytic) : json(nullptr)}};
    if (!cfg.actuals.empty()) {
        const std::string atext = slurp(cfg.actuals, "actuals");
        std::istringstream ain(atext);
        const auto actuals = rework::parse_actuals(ain, {cfg.delim()});
        rework::ChartOptions opts;
        opts.iterations = cfg.iterations;
        opts.seed = cfg.seed;
        opts.update_posteriors = cfg.update_posteriors;
        const auto chart = rework::control_chart(specs, actuals, opts);
        out.csv("control_chart.csv", [&](std::ostream& os) { report::write_control_chart(os, chart, cfg.delim()); });
        j["control_chart"] = report::to_json(chart);
        out.svg("control_chart.svg", svg::control_chart(chart, "Rework hours control chart"));
        for (const auto& p : chart.points)
            if (p.flag != rework::Flag::InControl)
                std::cout << "state " << p.state << ": " << rework::to_string(p.flag) << " ("
                          << report::fixed6(p.median) << " h)\n";
    }
    out.json_file("rework.json", j);
    out.svg("rework_histogram.svg", svg::histogram(estimate.samples, "Total rework man-hours"));
    std::cout << "median " << report::fixed6(limits.cl) << " h, UCL " << report::fixed6(limits.ucl) << " h\n";
    return 0;
}

inline int run(const RunConfig& cfg) {
    Output out(cfg);
    if (cfg.command == "summarize") return cmd_summarize(cfg, out);
    if (cfg.command == "interval") return cmd_interval(cfg, out);
    if (cfg.command == "operators") return cmd_operators(cfg, out);
    if (cfg.command == "complexity") return cmd_complexity(cfg, out);
    if (cfg.command == "forecast") return cmd_forecast(cfg, out);
    if (cfg.command == "rework") return cmd_rework(cfg, out);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace bayesqc::cli

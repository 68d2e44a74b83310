#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "commands.hpp"

using bayesqc::cli::json;

namespace {

// Every flag writes straight into the override object under its config key,
// so flags and config files share one code path.
struct Flags {
    json overrides = json::object();

    template <class T>
    void opt(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<T>(flag, [this, key](const T& v) { overrides[key] = v; }, help);
    }
    void vec(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::vector<std::string>>(
               flag, [this, key](const std::vector<std::string>& v) { overrides[key] = v; }, help)
            ->delimiter(',');
    }
    void flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_flag_function(flag, [this, key](std::int64_t n) { overrides[key] = n > 0; }, help);
    }
};

void add_common(Flags& f, CLI::App* s) {
    f.opt<std::string>(s, "-o,--output-dir", "output_dir", "Directory for report files");
    f.vec(s, "--formats", "formats", "Output formats (csv,json,svg)");
    f.opt<std::string>(s, "--delimiter", "delimiter", "Field delimiter of inputs and outputs");
    f.opt<double>(s, "--prior-a", "prior_a", "Prior Beta shape a");
    f.opt<double>(s, "--prior-b", "prior_b", "Prior Beta shape b");
    f.opt<std::uint64_t>(s, "--seed", "seed", "Random seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian fraction-nonconforming analytics for pass/fail inspection data"};
    app.set_version_flag("--version", std::string(bayesqc::kVersion));
    app.require_subcommand(0, 1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file; flags override its values");

    Flags f;

    auto* sum = app.add_subcommand("summarize", "Group inspection records into total/inspected/repaired counts");
    f.opt<std::string>(sum, "-i,--input", "input", "Inspection records file");
    f.vec(sum, "--group-by", "group_by", "Grouping keys: nps,schedule,material,weld_kind,operator_id");
    f.opt<std::string>(sum, "--project-type", "project_type", "Keep only this project type");

    auto* iv = app.add_subcommand("interval", "Posterior and credible interval for one count pair");
    f.opt<std::uint64_t>(iv, "--failed", "failed", "Failed (repaired) items X");
    f.opt<std::uint64_t>(iv, "--inspected", "inspected", "Inspected items n");
    f.opt<double>(iv, "--alpha", "alpha", "1 - credible level");
    f.flag(iv, "--classical", "classical", "Add Wald, Wilson and Agresti-Coull intervals");

    auto* ops = app.add_subcommand("operators", "Rank operators by MCMC posterior and compare them pairwise");
    f.opt<std::string>(ops, "-i,--input", "input", "Inspection records or operator summary file");
    f.opt<std::string>(ops, "--nps", "nps", "Filter: NPS");
    f.opt<std::string>(ops, "--schedule", "schedule", "Filter: schedule");
    f.opt<std::string>(ops, "--material", "material", "Filter: material");
    f.opt<std::string>(ops, "--weld-kind", "weld_kind", "Filter: weld kind");
    f.opt<std::uint64_t>(ops, "--min-inspected", "min_inspected", "Minimum inspected welds per operator");
    f.opt<std::uint64_t>(ops, "--chain-iterations", "chain_iterations", "MCMC draws per chain");
    f.opt<std::uint64_t>(ops, "--burn-in", "burn_in", "Draws discarded at the start of each chain");
    f.opt<double>(ops, "--proposal-sd", "proposal_sd", "Random-walk proposal sd (log scale)");
    f.opt<std::uint64_t>(ops, "--max-lag", "max_lag", "Largest ACF lag reported");
    f.opt<std::uint64_t>(ops, "--resamples", "resamples", "A/B resamples per pair");

    auto* cx = app.add_subcommand("complexity", "Complexity scores, Hellinger matrix and clustering");
    f.opt<std::string>(cx, "-i,--input", "input", "Type summary or inspection records file");
    f.opt<std::uint64_t>(cx, "--top-n", "top_n", "Use only the n types with the most welds");
    f.opt<std::uint64_t>(cx, "-k,--clusters", "clusters", "Number of clusters to cut");

    auto* fc = app.add_subcommand("forecast", "Monte Carlo project fraction nonconforming");
    f.opt<std::string>(fc, "--design", "design", "Project design file (type columns + count)");
    f.opt<std::string>(fc, "--history", "history", "Historical type summary file");
    f.opt<std::uint64_t>(fc, "-n,--iterations", "iterations", "Monte Carlo iterations");
    f.opt<std::string>(fc, "--mode", "mode", "per_weld or mixture");

    auto* rw = app.add_subcommand("rework", "Rework man-hour estimate and control chart");
    f.opt<std::string>(rw, "--specs", "specs", "Product specs file");
    f.opt<std::string>(rw, "--actuals", "actuals", "Actual results file (optional)");
    f.opt<std::uint64_t>(rw, "-n,--iterations", "iterations", "Monte Carlo iterations");
    f.opt<double>(rw, "--efficiency", "efficiency", "Default efficiency factor");
    f.flag(rw, "--update-posteriors", "update_posteriors", "Update same-type posteriors with observed results");

    for (auto* s : {sum, iv, ops, cx, fc, rw}) add_common(f, s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(bayesqc::ExitCode::ConfigError);
    }

    try {
        bayesqc::cli::RunConfig cfg;
        if (!config_path.empty()) bayesqc::cli::apply(cfg, bayesqc::cli::load_config_file(config_path));
        const auto subs = app.get_subcommands();
        if (!subs.empty()) {
            const std::string name = subs.front()->get_name();
            if (!cfg.command.empty() && cfg.command != name)
                throw bayesqc::ConfigError("config file is for '" + cfg.command + "', not '" + name + "'");
            cfg.command = name;
        }
        if (cfg.command.empty()) {
            std::cerr << app.help();
            return static_cast<int>(bayesqc::ExitCode::ConfigError);
        }
        bayesqc::cli::apply(cfg, f.overrides);
        bayesqc::cli::finalize(cfg);
        return bayesqc::cli::run(cfg);
    } catch (const bayesqc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(bayesqc::ExitCode::DomainError);
    }
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = BAYESQC_DEMO_DATA;

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("bayesqc_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run(const std::string& args) {
    const std::string cmd = std::string(BAYESQC_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Strips the provenance block so runs with different output dirs compare.
json payload(const fs::path& p) {
    auto j = json::parse(read(p));
    j.erase("provenance");
    return j;
}

}  // namespace

TEST(Cli, IntervalReport) {
    const auto d = fresh_dir("interval");
    ASSERT_EQ(run("interval --failed 10 --inspected 100 --alpha 0.05 --classical -o " + d.string()), 0);
    const auto j = json::parse(read(d / "interval.json"));
    EXPECT_NEAR(j["credible_interval"]["lower"].get<double>(), 0.0526, 5e-4);
    EXPECT_NEAR(j["credible_interval"]["upper"].get<double>(), 0.1701, 5e-4);
    EXPECT_TRUE(j["classical"].contains("wald"));
    EXPECT_EQ(j["provenance"]["command"], "interval");
    EXPECT_EQ(j["provenance"]["config"]["failed"], 10);
}

TEST(Cli, IntervalNoDataIsPrior) {
    const auto d = fresh_dir("interval0");
    ASSERT_EQ(run("interval --failed 0 --inspected 0 -o " + d.string()), 0);
    const auto j = json::parse(read(d / "interval.json"));
    EXPECT_EQ(j["posterior"]["a"], 0.5);
    EXPECT_EQ(j["posterior"]["b"], 0.5);
}

TEST(Cli, ExitCodes) {
    const auto d = fresh_dir("codes");
    EXPECT_EQ(run("interval --failed 5 --inspected 3 -o " + d.string()), 4);
    EXPECT_EQ(run("interval --failed 5 -o " + d.string()), 3);
    EXPECT_EQ(run("interval --failed 1 --inspected 3 --alpha 2 -o " + d.string()), 3);
    EXPECT_EQ(run("summarize -i " + (d / "missing.csv").string() + " -o " + d.string()), 2);
    EXPECT_EQ(run("summarize -i " + kData + "/rework_specs.csv -o " + d.string()), 2);
    EXPECT_EQ(run("nonsense"), 3);
    EXPECT_EQ(run("summarize -i " + kData + "/weld_records.csv --group-by nps,colour -o " + d.string()), 3);
}

TEST(Cli, SummarizeWithRejections) {
    const auto d = fresh_dir("summarize");
    ASSERT_EQ(run("summarize -i " + kData + "/weld_records.csv -o " + d.string()), 0);
    EXPECT_TRUE(fs::exists(d / "summary.csv"));
    EXPECT_TRUE(fs::exists(d / "rejections.csv"));
    const auto s = read(d / "summary.csv");
    EXPECT_EQ(s.rfind("# command: summarize", 0), 0u);
    EXPECT_NE(s.find("total_welds,inspected_welds,repaired_welds"), std::string::npos);
    const auto r = read(d / "rejections.csv");
    EXPECT_NE(r.find("blank field"), std::string::npos);
    EXPECT_NE(r.find("invalid status"), std::string::npos);
}

TEST(Cli, ConfigReproducesOutputByteForByte) {
    const auto d = fresh_dir("reproduce");
    ASSERT_EQ(run("rework --specs " + kData + "/rework_specs.csv --actuals " + kData +
                  "/actuals_over_control.csv -n 200 --seed 5 -o " + d.string()),
              0);
    const auto first = read(d / "control_chart.csv");
    const auto j = json::parse(read(d / "rework.json"));
    {
        std::ofstream cfg(d / "cfg.json");
        cfg << j["provenance"]["config"].dump();
    }
    fs::remove(d / "control_chart.csv");
    ASSERT_EQ(run("--config " + (d / "cfg.json").string()), 0);
    EXPECT_EQ(read(d / "control_chart.csv"), first);
}

TEST(Cli, OutputDirFromEnvironment) {
    const auto d = fresh_dir("env");
    const std::string cmd = "BAYESQC_OUTPUT_DIR=" + d.string() + " " + BAYESQC_CLI +
                            " interval --failed 1 --inspected 3 --formats json > /dev/null 2>&1";
    ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    EXPECT_TRUE(fs::exists(d / "interval.json"));
}

TEST(Cli, FlagsOverrideConfig) {
    const auto d = fresh_dir("override");
    {
        std::ofstream cfg(d / "cfg.json");
        cfg << R"({"command":"interval","failed":1,"inspected":3,"alpha":0.1})";
    }
    ASSERT_EQ(run("--config " + (d / "cfg.json").string() + " interval --alpha 0.2 -o " + d.string()), 0);
    const auto j = json::parse(read(d / "interval.json"));
    EXPECT_DOUBLE_EQ(j["provenance"]["config"]["alpha"].get<double>(), 0.2);
    {
        std::ofstream cfg(d / "bad.json");
        cfg << R"({"colour":1})";
    }
    EXPECT_EQ(run("--config " + (d / "bad.json").string() + " interval"), 3);
}

TEST(Cli, OperatorsSingleAndMany) {
    const auto d = fresh_dir("operators");
    ASSERT_EQ(run("operators -i " + kData + "/operators_std_2_a_bw.csv --chain-iterations 3000 --resamples 5000 -o " +
                  d.string()),
              0);
    const auto j = json::parse(read(d / "operators.json"));
    ASSERT_EQ(j["operators"].size(), 17u);
    EXPECT_EQ(j["operators"][0]["operator_id"], "1");
    EXPECT_EQ(j["ab_matrix"]["ids"].size(), 17u);
    EXPECT_TRUE(fs::exists(d / "operators_boxplot.svg"));

    const auto d1 = fresh_dir("operator1");
    {
        std::ofstream f(d1 / "one.csv");
        f << "operator_id,total_welds,inspected_welds,repaired_welds\n7,120,120,6\n";
    }
    ASSERT_EQ(run("operators -i " + (d1 / "one.csv").string() + " --chain-iterations 1000 -o " + d1.string()), 0);
    const auto one = json::parse(read(d1 / "operators.json"));
    EXPECT_EQ(one["ab_matrix"]["values"], json::parse("[[0.5]]"));
}

TEST(Cli, ComplexityTopOne) {
    const auto d = fresh_dir("complexity");
    ASSERT_EQ(run("complexity -i " + kData + "/weld_types_35.csv --top-n 1 -o " + d.string()), 0);
    const auto j = json::parse(read(d / "dendrogram.json"));
    ASSERT_EQ(j["clusters"].size(), 1u);
    EXPECT_EQ(j["clusters"][0]["cluster"], "A");
    EXPECT_EQ(j["scores"][0]["scaled"], 0.0);
}

TEST(Cli, ComplexityEightProducts) {
    const auto d = fresh_dir("complexity8");
    ASSERT_EQ(run("complexity -i " + kData + "/products_8.csv -k 4 -o " + d.string()), 0);
    const auto j = json::parse(read(d / "dendrogram.json"));
    ASSERT_EQ(j["clusters"].size(), 4u);
    EXPECT_EQ(j["clusters"][0]["members"], json::parse(R"(["3","4"])"));
    EXPECT_TRUE(j["clusters"][0].contains("business_share"));
}

TEST(Cli, ForecastQuantileRow) {
    const auto d = fresh_dir("forecast");
    ASSERT_EQ(run("forecast --design " + kData + "/project_design.csv --history " + kData +
                  "/weld_types_35.csv -n 1 -o " + d.string()),
              0);
    const auto q = read(d / "forecast_quantiles.csv");
    EXPECT_NE(q.find("quantiles,0%,10%,20%,30%,40%,50%,60%,70%,80%,90%,100%"), std::string::npos);
    const auto j = payload(d / "forecast.json");
    EXPECT_EQ(j["quantiles"]["0%"], j["quantiles"]["100%"]);
}

TEST(Cli, ReworkPlanning) {
    const auto d = fresh_dir("rework");
    ASSERT_EQ(run("rework --specs " + kData + "/rework_specs.csv -o " + d.string()), 0);
    const auto j = payload(d / "rework.json");
    EXPECT_NEAR(j["estimate"]["quantiles"]["50%"].get<double>(), 3.4, 0.2);
    EXPECT_FALSE(fs::exists(d / "control_chart.csv"));
    const auto q = read(d / "rework_quantiles.csv");
    EXPECT_NE(q.find("rework_hours,"), std::string::npos);
}

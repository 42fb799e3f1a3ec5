#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "windtrip/cli.hpp"
#include "windtrip/logio.hpp"
#include "windtrip/scenario.hpp"
#include "windtrip/summary.hpp"

using namespace windtrip;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("windtrip_harness_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small, fast mission used by the CLI round trips below.
nlohmann::json quick_config_json() {
    ScenarioConfig sc = scenario_by_name("jet");
    sc.plan.target = {0.8, 0.0, 1.0};
    sc.plan.outbound_speed = 0.4;
    sc.plan.return_speed = 1.0;
    sc.plan.preroll = 0.4;
    sc.plan.settle = 0.4;
    sc.plan.dwell = 0.4;
    sc.seed = 11;
    return to_json(sc);
}

}  // namespace

TEST(Config, UnknownKeysAreRejectedWithPaths) {
    nlohmann::json j = quick_config_json();
    j["vehicle"]["masss"] = 1.0;
    j["bogus_section"] = 1;
    j["plan"]["warp_speed"] = true;
    try {
        scenario_from_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("vehicle.masss"), std::string::npos);
        EXPECT_NE(msg.find("config.bogus_section"), std::string::npos);
        EXPECT_NE(msg.find("plan.warp_speed"), std::string::npos);
    }
}

TEST(Config, TypeAndRangeErrorsAreReported) {
    nlohmann::json j = quick_config_json();
    j["vehicle"]["mass"] = "heavy";
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = quick_config_json();
    j["vehicle"]["mass"] = -1.0;
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = quick_config_json();
    j["rates"]["position_hz"] = 300;  // does not divide 1000
    EXPECT_THROW(scenario_from_json(j), ConfigError);

    j = quick_config_json();
    j["field"] = {{"type", "vortex"}};
    EXPECT_THROW(scenario_from_json(j), ConfigError);
}

TEST(Config, EchoRoundTripIsStable) {
    for (const char* name : {"jet", "complex", "slow", "hover", "calm"}) {
        const ScenarioConfig sc = scenario_by_name(name);
        const nlohmann::json first = to_json(sc);
        const ScenarioConfig reparsed = scenario_from_json(first);
        const nlohmann::json second = to_json(reparsed);
        EXPECT_EQ(first.dump(), second.dump()) << "preset " << name;
    }
    EXPECT_THROW(scenario_by_name("does-not-exist"), ConfigError);
}

TEST(Config, PresetPlusOverridesFromFile) {
    const fs::path dir = fresh_dir("cfg");
    const fs::path path = dir / "config.json";
    write_text_file(path, R"({"scenario": "jet", "seed": 99,
                             "estimator": {"tau_force": 0.2}})");
    const ScenarioConfig sc = load_config_file(path.string());
    EXPECT_EQ(sc.seed, 99u);
    EXPECT_EQ(sc.estimator.tau_force, 0.2);
    EXPECT_EQ(sc.field_config.at("type"), "jet");  // preset retained
    fs::remove_all(dir);
}

TEST(Cli, ReportOnEmptyDirectoryFails) {
    const fs::path dir = fresh_dir("empty");
    EXPECT_EQ(run_cli({"report", "--dir", dir.string()}), 1);
    fs::remove_all(dir);
}

TEST(Cli, InvalidArgumentsFail) {
    EXPECT_NE(run_cli({"frobnicate"}), 0);
    EXPECT_NE(run_cli({"roundtrip"}), 0);  // neither --config nor --scenario
    EXPECT_NE(run_cli({"simulate", "--scenario", "jet", "--leg", "sideways"}), 0);
    EXPECT_NE(run_cli({"fieldmap", "--field", "jet", "--plane", "q=1"}), 0);
}

TEST(Cli, FieldmapGridHitsJetReferenceSpeed) {
    const fs::path dir = fresh_dir("fieldmap");
    const fs::path csv = dir / "map.csv";
    ASSERT_EQ(run_cli({"fieldmap", "--field", "jet", "--plane", "z=1.0", "--min", "0.5,-0.5",
                       "--max", "1.5,0.5", "--res", "0.05", "--out", csv.string()}),
              0);
    const CsvTable table = read_csv(csv);
    const std::size_t speed_col = table.column("speed");
    double max_speed = 0.0;
    for (const auto& row : table.rows) {
        max_speed = std::max(max_speed, row[speed_col]);
    }
    EXPECT_NEAR(max_speed, 6.0, 0.05);
    fs::remove_all(dir);
}

TEST(Cli, RoundtripWritesLogsAndReportRegeneratesSummaryByteExact) {
    const fs::path dir = fresh_dir("roundtrip");
    const fs::path cfg = dir / "config_in.json";
    write_text_file(cfg, quick_config_json().dump(2));
    const fs::path out = dir / "run";
    ASSERT_EQ(run_cli({"roundtrip", "--config", cfg.string(), "--out", out.string()}), 0);

    for (const char* f : {"config.json", "truth_1000hz.csv", "estimates_500hz.csv",
                          "pose_200hz.csv", "commands_50hz.csv", "track.csv", "summary.json"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
    const std::string original = read_text_file(out / "summary.json");
    fs::remove(out / "summary.json");
    ASSERT_EQ(run_cli({"report", "--dir", out.string()}), 0);
    EXPECT_EQ(read_text_file(out / "summary.json"), original);
    fs::remove_all(dir);
}

TEST(Cli, ConfigEchoIsSufficientToReproduceARun) {
    const fs::path dir = fresh_dir("echo");
    const fs::path cfg = dir / "config_in.json";
    write_text_file(cfg, quick_config_json().dump(2));
    const fs::path out1 = dir / "a", out2 = dir / "b";
    ASSERT_EQ(run_cli({"roundtrip", "--config", cfg.string(), "--out", out1.string()}), 0);
    // Re-run purely from the echoed config.
    ASSERT_EQ(run_cli({"roundtrip", "--config", (out1 / "config.json").string(), "--out",
                       out2.string()}),
              0);
    for (const char* f :
         {"truth_1000hz.csv", "estimates_500hz.csv", "commands_50hz.csv", "track.csv"}) {
        EXPECT_EQ(file_hash(out1 / f), file_hash(out2 / f)) << f;
    }
    fs::remove_all(dir);
}

TEST(Cli, CompareReportsReduction) {
    const fs::path dir = fresh_dir("compare");
    const fs::path cfg = dir / "config_in.json";
    write_text_file(cfg, quick_config_json().dump(2));
    const fs::path out = dir / "cmp";
    ASSERT_EQ(run_cli({"compare", "--config", cfg.string(), "--modes", "feedback,feedforward",
                       "--out", out.string()}),
              0);
    const auto j = nlohmann::json::parse(read_text_file(out / "compare.json"));
    EXPECT_TRUE(j.contains("reduction_percent_ff_vs_feedback"));
    EXPECT_TRUE(j.at("rmse_m").contains("feedback"));
    EXPECT_TRUE(j.at("rmse_m").contains("feedforward"));
    EXPECT_TRUE(fs::exists(out / "feedback" / "summary.json"));
    EXPECT_TRUE(fs::exists(out / "feedforward" / "summary.json"));
    fs::remove_all(dir);
}

TEST(Cli, SweepRunsAllValuesInParallel) {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = dir / "config_in.json";
    write_text_file(cfg, quick_config_json().dump(2));
    const fs::path out = dir / "sw";
    ASSERT_EQ(run_cli({"sweep", "--config", cfg.string(), "--param", "estimator.tau_force",
                       "--values", "0.05,0.1", "--jobs", "2", "--out", out.string()}),
              0);
    const auto j = nlohmann::json::parse(read_text_file(out / "sweep.json"));
    ASSERT_EQ(j.at("runs").size(), 2u);
    EXPECT_EQ(j.at("param"), "estimator.tau_force");
    for (const auto& run : j.at("runs")) {
        EXPECT_TRUE(run.contains("rmse_feedback"));
        EXPECT_TRUE(run.contains("rmse_feedforward"));
        EXPECT_TRUE(run.contains("reduction_percent"));
    }
    fs::remove_all(dir);
}

TEST(Cli, SimulateOutboundThenFeedforwardReturnAcrossInvocations) {
    const fs::path dir = fresh_dir("twostage");
    const fs::path cfg = dir / "config_in.json";
    write_text_file(cfg, quick_config_json().dump(2));
    const fs::path out_leg = dir / "outbound";
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--leg", "outbound", "--out",
                       out_leg.string()}),
              0);
    const fs::path track = out_leg / "track.csv";
    ASSERT_TRUE(fs::exists(track));
    ASSERT_TRUE(fs::exists(out_leg / "track.csv.meta.json"));

    const fs::path ret_leg = dir / "return";
    ASSERT_EQ(run_cli({"simulate", "--config", cfg.string(), "--leg", "return", "--mode",
                       "feedforward", "--track", track.string(), "--out", ret_leg.string()}),
              0);
    const auto summary = nlohmann::json::parse(read_text_file(ret_leg / "summary.json"));
    EXPECT_GT(summary.at("phases").at("return").at("record_steps").get<long>(), 0);
    fs::remove_all(dir);
}

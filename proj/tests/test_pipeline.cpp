#include <catch2/catch_amalgamated.hpp>

#include "imdr/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "oracles.hpp"
#include "temp_files.hpp"

using namespace imdr;
using testutil::TempDir;
namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = IMDR_DATA_DIR;
const std::string kCli = IMDR_CLI_PATH;

int run_cli(const std::string& args, const fs::path& output_dir) {
    const std::string command = "IMDR_OUTPUT_DIR=" + output_dir.string() + " " + kCli + " " +
                                args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

RunConfig mini_config(const fs::path& output_dir) {
    RunConfig config = load_run_config(kDataDir / "mini" / "config.json");
    config.output_dir = output_dir;
    return config;
}

} // namespace

TEST_CASE("mini build produces scores, normalized matrix and audit log") {
    TempDir dir;
    const RunConfig config = mini_config(dir.path / "out");
    cmd_build(config);

    REQUIRE(fs::exists(config.output_dir / "scores.csv"));
    REQUIRE(fs::exists(config.output_dir / "normalized.csv"));
    REQUIRE(fs::exists(config.output_dir / "audit.txt"));

    const CsvTable scores = read_csv(config.output_dir / "scores.csv");
    REQUIRE(scores.rows.size() == 6);
    CHECK(scores.header[0] == "area_code");
    CHECK(scores.header[1] == "area_name");
    CHECK(scores.header[2] == "unweighted");
    CHECK(scores.header[3] == "weighted");
    CHECK(scores.header[4] == "rank_weighted");
    CHECK(scores.has_column("weighted_display"));

    const CsvTable normalized = read_csv(config.output_dir / "normalized.csv");
    CHECK(normalized.header[2] == "Smoking");
    CHECK(normalized.header[3] == "NOT Education"); // reversed column annotation
    CHECK(normalized.header[4] == "Obesity");

    const std::string audit = testutil::slurp(config.output_dir / "audit.txt");
    CHECK(audit.find("normalized weights") != std::string::npos);
    CHECK(audit.find("education -> NOT Education") != std::string::npos);
    CHECK(audit.find("column ranges") != std::string::npos);
}

TEST_CASE("build is deterministic and idempotent in the same output dir") {
    TempDir dir;
    const RunConfig config = mini_config(dir.path / "out");
    cmd_build(config);
    const std::string first = testutil::slurp(config.output_dir / "scores.csv");
    cmd_build(config);
    const std::string second = testutil::slurp(config.output_dir / "scores.csv");
    CHECK(first == second);

    // atomic writes leave no temp files behind
    for (const auto& entry : fs::directory_iterator(config.output_dir))
        CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("an area dominating every indicator ranks first with weighted score 1") {
    TempDir dir;
    // area T tops every column (education is reversed, so it needs the minimum)
    dir.file("a.csv", "code,rate\nT,10\nU,2\nV,5\n");
    dir.file("b.csv", "code,rate\nT,1\nU,9\nV,4\n"); // risk-decreasing
    dir.file("config.json", R"({
      "index": {"name": "demo", "indicators": [
        {"id": "a", "weight_percent": 75},
        {"id": "b", "weight_percent": 25, "polarity": "risk_decreasing"}
      ]},
      "inputs": {
        "a": {"csv": "a.csv"},
        "b": {"csv": "b.csv"}
      },
      "output_dir": "out"
    })");
    RunConfig config = load_run_config(dir.path / "config.json");
    const BuildArtifacts artifacts = run_build(config);
    REQUIRE(artifacts.ranking_weighted.size() == 3);
    CHECK(artifacts.ranking_weighted[0].area.code == "T");
    CHECK(artifacts.ranking_weighted[0].rank == 1);
    CHECK(artifacts.ranking_weighted[0].score == 1.0);
}

TEST_CASE("missing input CSV is a config error naming the path") {
    TempDir dir;
    dir.file("config.json", R"({
      "index": {"name": "demo", "indicators": [
        {"id": "a", "weight_percent": 50}, {"id": "b", "weight_percent": 50}
      ]},
      "inputs": {
        "a": {"csv": "a.csv"},
        "b": {"csv": "nowhere.csv"}
      }
    })");
    dir.file("a.csv", "code,rate\nX,1\nY,2\n");
    try {
        load_run_config(dir.path / "config.json");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nowhere.csv") != std::string::npos);
    }
}

TEST_CASE("run config validation catches structural mistakes") {
    TempDir dir;
    dir.file("a.csv", "code,rate\nX,1\nY,2\n");

    dir.file("bad_weights.json", R"({
      "index": {"name": "demo", "indicators": [
        {"id": "a", "weight_percent": 50}, {"id": "b", "weight_percent": 49}
      ]},
      "inputs": {"a": {"csv": "a.csv"}, "b": {"csv": "a.csv"}}
    })");
    CHECK_THROWS_AS(load_run_config(dir.path / "bad_weights.json"), ConfigError);

    dir.file("stray_input.json", R"({
      "index": {"name": "demo", "indicators": [
        {"id": "a", "weight_percent": 50}, {"id": "b", "weight_percent": 50}
      ]},
      "inputs": {"a": {"csv": "a.csv"}, "b": {"csv": "a.csv"}, "c": {"csv": "a.csv"}}
    })");
    CHECK_THROWS_AS(load_run_config(dir.path / "stray_input.json"), ConfigError);

    dir.file("not_json.json", "{ this is not json");
    CHECK_THROWS_AS(load_run_config(dir.path / "not_json.json"), ConfigError);
}

TEST_CASE("correlate pipeline: report shape, exclusion and control") {
    TempDir dir;
    const RunConfig config = [&] {
        RunConfig c = load_run_config(kDataDir / "imdr" / "config.json");
        c.output_dir = dir.path / "out";
        return c;
    }();
    const BuildArtifacts artifacts = run_build(config);

    const CorrelationReport full = run_correlate(config, artifacts, {});
    REQUIRE(full.size() == 6); // IMDR (W), IMDR (Uw), 4 validation measures
    CHECK(full.n == 207);
    CHECK(full.df == 205);
    CHECK(full.variable_names[0] == "IMDR (W)");
    CHECK(full.variable_names[1] == "IMDR (Uw)");
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(full.r(i, i) == 1.0);

    CorrelateOptions exclude;
    exclude.exclude = "london_ccgs";
    const CorrelationReport reduced = run_correlate(config, artifacts, exclude);
    CHECK(reduced.n == 175);
    CHECK(reduced.df == 173);
    CHECK(reduced.excluded_areas.size() == 32);

    CorrelateOptions control;
    control.control = "avg_age";
    const CorrelationReport partial = run_correlate(config, artifacts, control);
    CHECK(partial.kind == CorrelationKind::PartialControllingFor);
    CHECK(partial.control_variable == "Avg. Age");
    CHECK(partial.df == 204); // n - 3
    REQUIRE(partial.size() == 5); // control row omitted
    for (const auto& name : partial.variable_names) CHECK(name != "Avg. Age");

    CorrelateOptions bad;
    bad.exclude = "atlantis";
    CHECK_THROWS_AS(run_correlate(config, artifacts, bad), ConfigError);
    bad = {};
    bad.control = "shoe_size";
    CHECK_THROWS_AS(run_correlate(config, artifacts, bad), ConfigError);
}

TEST_CASE("correlate writes reports under variant-specific names") {
    TempDir dir;
    RunConfig config = load_run_config(kDataDir / "imdr" / "config.json");
    config.output_dir = dir.path / "out";
    CorrelateOptions options;
    options.exclude = "london_ccgs";
    options.control = "avg_age";
    cmd_correlate(config, options);
    CHECK(fs::exists(config.output_dir / "correlation_partial_avg_age_excl_london_ccgs.txt"));
    CHECK(fs::exists(config.output_dir / "correlation_partial_avg_age_excl_london_ccgs.csv"));
}

TEST_CASE("render pipeline writes the requested artifacts") {
    TempDir dir;
    RunConfig config = mini_config(dir.path / "out");
    RenderOptions options;
    options.map = true;
    options.radar = "top 2";
    options.histogram_bins = 10;
    cmd_render(config, options);

    CHECK(fs::exists(config.output_dir / "map_weighted.svg"));
    CHECK(fs::exists(config.output_dir / "map_unweighted.svg"));
    CHECK(fs::exists(config.output_dir / "histogram.svg"));
    CHECK(fs::exists(config.output_dir / "scores.geojson"));

    // top 2 by weighted score: M4 then M5
    CHECK(fs::exists(config.output_dir / "radar_M4.svg"));
    CHECK(fs::exists(config.output_dir / "radar_M5.svg"));

    const std::string histogram = testutil::slurp(config.output_dir / "histogram.svg");
    CHECK(oracle::count_occurrences(histogram, "class=\"bar\"") == 10);

    std::string why;
    for (const char* name : {"map_weighted.svg", "map_unweighted.svg", "histogram.svg",
                             "radar_M4.svg", "radar_M5.svg"}) {
        CHECK(oracle::xml_well_formed(testutil::slurp(config.output_dir / name), &why));
        INFO(name << ": " << why);
    }
}

TEST_CASE("radar selector grammar") {
    std::vector<RankedArea> ranking = {
        {1, {"A", ""}, 0.9}, {2, {"B", ""}, 0.8}, {3, {"C", ""}, 0.7}};
    CHECK(select_radar_areas("top 2", ranking) == std::vector<std::string>{"A", "B"});
    CHECK(select_radar_areas("bottom 1", ranking) == std::vector<std::string>{"C"});
    CHECK(select_radar_areas("top:3", ranking) == std::vector<std::string>{"A", "B", "C"});
    CHECK(select_radar_areas("B", ranking) == std::vector<std::string>{"B"});
    CHECK_THROWS_AS(select_radar_areas("top banana", ranking), ConfigError);
}

TEST_CASE("describe lists indicators with polarity flags and weights") {
    const RunConfig config = load_run_config(kDataDir / "imdr" / "config.json");
    const std::string text = describe(config);
    CHECK(text.find("index: IMDR") != std::string::npos);
    CHECK(text.find("education") != std::string::npos);
    CHECK(text.find("(reversed: NOT Education)") != std::string::npos);
    CHECK(text.find("(reversed: NOT Healthy Diet)") != std::string::npos);
    CHECK(text.find("london_ccgs: 32 areas") != std::string::npos);
    CHECK(oracle::count_occurrences(text, "risk-") == 9);
}

TEST_CASE("cli process exits: 0 on success, 1 on config errors, 2 on data errors") {
    TempDir dir;

    const int ok = run_cli("build --config " + (kDataDir / "mini" / "config.json").string(),
                           dir.path / "ok");
    CHECK(ok == 0);
    CHECK(fs::exists(dir.path / "ok" / "scores.csv")); // env var override respected

    const int usage = run_cli("build", dir.path / "u");
    CHECK(usage == 1);

    const int missing_config =
        run_cli("build --config " + (dir.path / "absent.json").string(), dir.path / "m");
    CHECK(missing_config == 1);

    // constant column: a data error surfaced from normalization
    dir.file("flat/config.json", R"({
      "index": {"name": "flat", "indicators": [
        {"id": "a", "weight_percent": 50}, {"id": "b", "weight_percent": 50}
      ]},
      "inputs": {"a": {"csv": "a.csv"}, "b": {"csv": "b.csv"}},
      "output_dir": "out"
    })");
    dir.file("flat/a.csv", "code,rate\nX,1\nY,2\n");
    dir.file("flat/b.csv", "code,rate\nX,7\nY,7\n");
    const int data_error =
        run_cli("build --config " + (dir.path / "flat" / "config.json").string(), dir.path / "d");
    CHECK(data_error == 2);

    // describe on a malformed config: nonzero, no partial output
    dir.file("broken.json", "{ nope");
    const int describe_bad =
        run_cli("describe --config " + (dir.path / "broken.json").string(), dir.path / "x");
    CHECK(describe_bad == 1);
    CHECK_FALSE(fs::exists(dir.path / "x"));

    const int unknown_flag = run_cli(
        "correlate --config " + (kDataDir / "mini" / "config.json").string() +
            " --exclude nothere",
        dir.path / "e");
    CHECK(unknown_flag == 1);
}

#include <filesystem>

#include <gtest/gtest.h>

#include "nntrack/csv.hpp"
#include "nntrack/harness.hpp"
#include "nntrack/io.hpp"

using namespace nntrack;
namespace fs = std::filesystem;

namespace {

ScenarioConfig quick(std::size_t steps = 23) {
    ScenarioConfig cfg;
    cfg.steps = steps;
    cfg.train.iterations = 200;
    return cfg;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nntrack_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(BuildScenario, TwentyStepsGiveEighteenWindowRows) {
    const ScenarioData d = build_scenario(quick(20));
    ASSERT_EQ(d.tracks.size(), 1u);
    EXPECT_EQ(d.tracks[0].truth.states.size(), 20u);
    EXPECT_EQ(d.tracks[0].measurements.size(), 20u);
    EXPECT_EQ(d.tracks[0].windows.size(), 18u);
    EXPECT_EQ(d.tracks[0].ekf.estimates.size(), 20u);
    // Fraction split leaves a two-row gap.
    EXPECT_EQ(d.train.size() + d.test.size(), 16u);
}

TEST(BuildScenario, ExplicitFifteenFourSplit) {
    ScenarioConfig cfg = quick();
    cfg.split.mode = SplitMode::Explicit;
    const ScenarioData d = build_scenario(cfg);
    ASSERT_EQ(d.train.size(), 15u);
    ASSERT_EQ(d.test.size(), 4u);
    EXPECT_EQ(d.train.back().row, 14u);
    EXPECT_EQ(d.test.front().row, 17u);

    cfg.steps = 20;
    EXPECT_THROW(build_scenario(cfg), Error);
}

TEST(BuildScenario, EveryModeIsDisjoint) {
    for (SplitMode mode : {SplitMode::Fraction, SplitMode::Explicit, SplitMode::Resample, SplitMode::CrossTrack}) {
        ScenarioConfig cfg = quick();
        cfg.split.mode = mode;
        const ScenarioData d = build_scenario(cfg);
        EXPECT_NO_THROW(check_disjoint(d, cfg.window)) << to_string(mode);
        EXPECT_FALSE(d.train.empty());
        EXPECT_FALSE(d.test.empty());
    }
}

TEST(CheckDisjoint, DetectsOverlap) {
    ScenarioData d = build_scenario(quick());
    d.test.push_back({0, d.train.back().row + 1});
    EXPECT_THROW(check_disjoint(d, 3), Error);
}

TEST(BuildScenario, ResampleSharesTruthButNotMeasurements) {
    ScenarioConfig cfg = quick();
    cfg.split.mode = SplitMode::Resample;
    const ScenarioData d = build_scenario(cfg);
    ASSERT_EQ(d.tracks.size(), 2u);
    EXPECT_EQ(d.tracks[0].truth.states, d.tracks[1].truth.states);
    EXPECT_NE(d.tracks[0].measurements[0].range, d.tracks[1].measurements[0].range);
}

TEST(EvaluateScenario, SameConfigIsBitIdentical) {
    const ScenarioConfig cfg = quick();
    const ScenarioResult a = evaluate_scenario(cfg);
    const ScenarioResult b = evaluate_scenario(cfg);
    EXPECT_EQ(a.training.final_cost, b.training.final_cost);
    EXPECT_EQ(a.nn_test, b.nn_test);
    EXPECT_EQ(a.ekf_test_metrics.distance_sum, b.ekf_test_metrics.distance_sum);
}

TEST(RunScenario, WritesByteIdenticalArtifacts) {
    const ScenarioConfig cfg = quick();
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    run_scenario(cfg, a);
    run_scenario(cfg, b);
    for (const char* name : {"config.json", "ground_truth.csv", "measurements.csv", "windows.csv", "ekf_track.csv",
                             "nn_track.csv", "metrics.json", "cost_trace.csv"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(read_text_file(a / name), read_text_file(b / name)) << name;
    }
    EXPECT_EQ(parse_windows(read_csv(a / "windows.csv")).size(), 21u);
}

TEST(ScenarioConfigJson, RoundTripAndUnknownKeys) {
    ScenarioConfig cfg = quick();
    cfg.split.mode = SplitMode::CrossTrack;
    cfg.train.screen_iterations = 50;
    cfg.normalize = true;
    const ScenarioConfig back = scenario_from_json(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));

    EXPECT_THROW(scenario_from_json({{"stpes", 3}}), Error);
    EXPECT_THROW(scenario_from_json({{"train", {{"lr", 1.0}}}}), Error);
    EXPECT_THROW(scenario_from_json({{"split", {{"mode", "random"}}}}), Error);
    EXPECT_THROW(scenario_from_json({{"steps", "many"}}), Error);
}

TEST(ScenarioConfig, ValidationRejectsBadValues) {
    ScenarioConfig cfg = quick();
    cfg.train.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = quick();
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = quick();
    cfg.steps = 2;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(RunFixture, NeedsMoreRowsThanTraining) {
    const auto table = parse_windows(read_csv(NNTRACK_TABLE2_FIXTURE));
    const std::vector<WindowSample> two(table.begin(), table.begin() + 2);
    FixtureConfig cfg;
    cfg.train.iterations = 10;
    cfg.train.restarts = 1;
    EXPECT_THROW(run_fixture(two, cfg), Error);

    const FixtureResult r = run_fixture(table, cfg);
    EXPECT_EQ(r.train_predictions.size(), 4u);
    EXPECT_EQ(r.test_predictions.size(), 1u);
    const nlohmann::json j = fixture_json(r);
    EXPECT_TRUE(j.contains("final_cost"));
    EXPECT_EQ(j.at("test_predictions").size(), 1u);
}

TEST(Sweep, GridShapeAndDeterministicOutput) {
    SweepConfig cfg = default_sweep_config();
    cfg.seeds = {1};
    cfg.base.train.iterations = 50;
    cfg.base.train.restarts = 1;
    const SweepSummary s = sweep(cfg);
    ASSERT_EQ(s.cells.size(), 3u);
    ASSERT_EQ(s.cells[0].size(), 5u);
    EXPECT_EQ(s.runs.size(), 15u);

    const std::string csv = sweep_long_csv(s);
    const CsvTable t = parse_csv(csv);
    EXPECT_EQ(t.header, (std::vector<std::string>{"gt", "cov_level", "method", "distance_sum"}));
    EXPECT_EQ(t.rows.size(), 30u);

    cfg.jobs = 3;
    EXPECT_EQ(sweep_long_csv(sweep(cfg)), csv);
}

TEST(Sweep, MissingCellsAreReportedAndCountAsInversions) {
    SweepSummary s;
    s.gt_names = {"gt1"};
    s.level_count = 3;
    s.cells = {{SweepCell{1.0, 1.0, 1, 1}, SweepCell{}, SweepCell{3.0, 1.0, 1, 1}}};
    EXPECT_NE(sweep_long_csv(s).find("missing"), std::string::npos);
    EXPECT_EQ(count_inversions(s), (std::vector<std::size_t>{2}));

    s.cells[0][1] = SweepCell{2.0, 1.0, 1, 1};
    EXPECT_EQ(count_inversions(s), (std::vector<std::size_t>{0}));
    s.cells[0][2].nn_mean = 1.5;
    EXPECT_EQ(count_inversions(s), (std::vector<std::size_t>{1}));
}

TEST(SweepConfigJson, RoundTripAndUnknownKeys) {
    const SweepConfig cfg = default_sweep_config();
    EXPECT_EQ(to_json(sweep_from_json(to_json(cfg))), to_json(cfg));
    EXPECT_THROW(sweep_from_json({{"level", nlohmann::json::array()}}), Error);
    EXPECT_THROW(sweep_from_json({{"levels", {{0.1}}}}), Error);
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nntrack/ekf.hpp"
#include "nntrack/metrics.hpp"
#include "nntrack/motion.hpp"
#include "nntrack/neural.hpp"
#include "nntrack/sensor.hpp"

namespace nntrack {

enum class SplitMode {
    Fraction,    // leading share of the window rows trains, the rest tests
    Explicit,    // fixed train/test row counts
    Resample,    // train on one measurement draw, test on a fresh draw of the same ground truth
    CrossTrack,  // train on other ground-truth tracks, test on the configured one
};

const char* to_string(SplitMode mode);
SplitMode split_mode_from_string(const std::string& s);

struct SplitConfig {
    SplitMode mode = SplitMode::Fraction;
    double train_fraction = 0.7;
    std::size_t train_rows = 15;
    std::size_t test_rows = 4;
    /// Number of training tracks in CrossTrack mode.
    std::size_t cross_tracks = 3;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;        // measurements and network initialization
    std::uint64_t truth_seed = 7;  // ground-truth process noise
    std::size_t steps = 23;
    double dt = kDefaultDt;
    double q = kDefaultProcessNoise;
    KinematicState init{0.0, 0.0, 1.0, 1.0};
    CartesianPoint sensor_position{50.0, 0.0};
    double r_bearing = kDefaultBearingVariance;
    double r_range = kDefaultRangeVariance;
    std::size_t window = 3;
    SplitConfig split;
    TrainConfig train;
    bool normalize = false;

    MotionModel motion_model() const { return make_cv_model(dt, q); }
    SensorModel sensor() const { return SensorModel::with_variances(sensor_position, r_bearing, r_range); }
    void validate() const;
};

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Reads the keys present in `j` on top of `base`; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& j, ScenarioConfig base = {});

/// One ground truth with its measurement draw, window rows, and EKF track.
struct MeasuredTrack {
    GroundTruthTrack truth;
    std::vector<Measurement> measurements;
    std::vector<CartesianPoint> converted;
    std::vector<WindowSample> windows;
    Track ekf;
};

struct RowRef {
    std::size_t track = 0;
    std::size_t row = 0;
};

struct ScenarioData {
    std::vector<MeasuredTrack> tracks;  // tracks[0] is the configured ground truth
    std::vector<RowRef> train;
    std::vector<RowRef> test;
};

/// Simulates, measures, filters and splits.  Throws ErrorKind::Config when
/// the split would leave no train or test rows.
ScenarioData build_scenario(const ScenarioConfig& cfg);

/// Throws unless no test window shares a measurement with any training window.
void check_disjoint(const ScenarioData& data, std::size_t window);

struct ScenarioResult {
    ScenarioData data;
    TrainResult training;  // parameters accept raw inputs even when normalize is on
    std::vector<CartesianPoint> nn_train;
    std::vector<CartesianPoint> nn_test;
    TrackComparison nn_train_metrics;
    TrackComparison nn_test_metrics;
    TrackComparison ekf_train_metrics;
    TrackComparison ekf_test_metrics;
};

ScenarioResult evaluate_scenario(const ScenarioConfig& cfg);

/// Writes config.json, ground_truth.csv, measurements.csv, windows.csv,
/// ekf_track.csv, nn_track.csv, metrics.json and cost_trace.csv.
void write_scenario(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir);

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& dir);

nlohmann::json scenario_metrics_json(const ScenarioResult& result);

// ---------------------------------------------------------------------------
// Fixture runs on a pre-built window table.

struct FixtureConfig {
    std::size_t train_rows = 4;
    std::vector<std::size_t> layer_sizes = kTrackerLayers;
    TrainConfig train{1e-4, 20000, 100, 0, 10};
};

struct FixtureResult {
    TrainResult training;
    std::vector<CartesianPoint> train_predictions;
    std::vector<CartesianPoint> test_predictions;
    TrackComparison train_metrics;
    TrackComparison test_metrics;
};

/// Trains on the leading train_rows rows and tests on the remainder.
FixtureResult run_fixture(const std::vector<WindowSample>& table, const FixtureConfig& cfg = {});
nlohmann::json fixture_json(const FixtureResult& result);

// ---------------------------------------------------------------------------
// Covariance sweep.

struct CovarianceLevel {
    double bearing = 0.0;  // rad^2
    double range = 0.0;    // m^2
};

struct GroundTruthSpec {
    std::string name;
    std::uint64_t truth_seed = 0;
    KinematicState init;
};

struct SweepConfig {
    std::vector<CovarianceLevel> levels;
    std::vector<GroundTruthSpec> ground_truths;
    std::vector<std::uint64_t> seeds;
    ScenarioConfig base;
    std::size_t jobs = 1;

    void validate() const;
};

/// cov1..cov5 on three ground truths over ten seeds, fresh-measurement testing on 10 windows.
SweepConfig default_sweep_config();

nlohmann::json to_json(const SweepConfig& cfg);
SweepConfig sweep_from_json(const nlohmann::json& j);

struct SweepRun {
    std::size_t gt = 0;
    std::size_t level = 0;
    std::uint64_t seed = 0;
    std::optional<double> nn_distance;
    std::optional<double> ekf_distance;
    std::string failure;
};

struct SweepCell {
    std::optional<double> nn_mean;
    std::optional<double> ekf_mean;
    std::size_t nn_count = 0;
    std::size_t ekf_count = 0;
};

struct SweepSummary {
    std::vector<std::string> gt_names;
    std::size_t level_count = 0;
    std::vector<std::vector<SweepCell>> cells;  // [gt][level]
    std::vector<SweepRun> runs;
};

/// Evaluates every (ground truth, level, seed) cell; failures are recorded, not thrown.
SweepSummary sweep(const SweepConfig& cfg);

/// Long-format summary: gt,cov_level,method,distance_sum ("missing" for empty cells).
std::string sweep_long_csv(const SweepSummary& summary);
/// One row per replication: gt,cov_level,seed,method,distance_sum.
std::string sweep_runs_csv(const SweepSummary& summary);
void write_sweep(const SweepConfig& cfg, const SweepSummary& summary, const std::filesystem::path& dir);

/// Number of adjacent level pairs whose mean NN distance decreases, per ground truth.
std::vector<std::size_t> count_inversions(const SweepSummary& summary);

}  // namespace nntrack

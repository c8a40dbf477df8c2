#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nntrack/csv.hpp"
#include "nntrack/harness.hpp"
#include "nntrack/io.hpp"

using namespace nntrack;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScenarioFlags {
    std::string config;
    std::optional<std::uint64_t> seed, truth_seed;
    std::optional<std::size_t> steps, window;
    std::optional<double> dt, q, r_bearing, r_range;
    std::optional<std::vector<double>> init, sensor;
    std::optional<std::string> split;
    std::optional<double> train_fraction;
    std::optional<std::size_t> train_rows, test_rows, cross_tracks;
    std::optional<double> learning_rate;
    std::optional<std::size_t> iterations, trace_every, restarts, screen_iterations;
    std::optional<bool> normalize;
};

void add_train_flags(CLI::App* cmd, ScenarioFlags& f) {
    cmd->add_option("--learning-rate", f.learning_rate, "Gradient descent step size");
    cmd->add_option("--iterations", f.iterations, "Gradient descent iterations");
    cmd->add_option("--trace-every", f.trace_every, "Cost logging interval");
    cmd->add_option("--restarts", f.restarts, "Independent initializations; best final cost wins");
    cmd->add_option("--screen-iterations", f.screen_iterations, "Short run per restart before the full run");
}

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool training) {
    cmd->add_option("--config", f.config, "Scenario config JSON; flags override its values");
    cmd->add_option("--seed", f.seed, "Measurement and network seed");
    cmd->add_option("--truth-seed", f.truth_seed, "Ground-truth process noise seed");
    cmd->add_option("--steps", f.steps, "Timesteps to simulate");
    cmd->add_option("--dt", f.dt, "Timestep in seconds");
    cmd->add_option("--q", f.q, "Process noise intensity");
    cmd->add_option("--init", f.init, "Initial state x y vx vy")->expected(4);
    cmd->add_option("--sensor", f.sensor, "Sensor position x y")->expected(2);
    cmd->add_option("--r-bearing", f.r_bearing, "Bearing variance (rad^2)");
    cmd->add_option("--r-range", f.r_range, "Range variance (m^2)");
    cmd->add_option("--window", f.window, "Measurements per network input window");
    if (!training) return;
    cmd->add_option("--split", f.split, "fraction, explicit, resample or cross-track");
    cmd->add_option("--train-fraction", f.train_fraction, "Training share for the fraction split");
    cmd->add_option("--train-rows", f.train_rows, "Training rows for the explicit split");
    cmd->add_option("--test-rows", f.test_rows, "Test rows");
    cmd->add_option("--cross-tracks", f.cross_tracks, "Training tracks for the cross-track split");
    cmd->add_option("--normalize", f.normalize, "Standardize network inputs (true/false)");
    add_train_flags(cmd, f);
}

template <typename T, typename U>
void override(T& target, const std::optional<U>& v) {
    if (v) target = *v;
}

void apply_train_flags(TrainConfig& t, const ScenarioFlags& f) {
    override(t.learning_rate, f.learning_rate);
    override(t.iterations, f.iterations);
    override(t.trace_every, f.trace_every);
    override(t.restarts, f.restarts);
    override(t.screen_iterations, f.screen_iterations);
}

json load_json(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, path + ": " + e.what());
    }
}

ScenarioConfig resolve(const ScenarioFlags& f) {
    ScenarioConfig cfg;
    if (!f.config.empty()) cfg = scenario_from_json(load_json(f.config));
    override(cfg.seed, f.seed);
    override(cfg.truth_seed, f.truth_seed);
    override(cfg.steps, f.steps);
    override(cfg.dt, f.dt);
    override(cfg.q, f.q);
    if (f.init) cfg.init = {(*f.init)[0], (*f.init)[1], (*f.init)[2], (*f.init)[3]};
    if (f.sensor) cfg.sensor_position = {(*f.sensor)[0], (*f.sensor)[1]};
    override(cfg.r_bearing, f.r_bearing);
    override(cfg.r_range, f.r_range);
    override(cfg.window, f.window);
    if (f.split) cfg.split.mode = split_mode_from_string(*f.split);
    override(cfg.split.train_fraction, f.train_fraction);
    override(cfg.split.train_rows, f.train_rows);
    override(cfg.split.test_rows, f.test_rows);
    override(cfg.split.cross_tracks, f.cross_tracks);
    override(cfg.normalize, f.normalize);
    apply_train_flags(cfg.train, f);
    return cfg;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// simulate: ground truth, one measurement draw, and its window table.
void cmd_simulate(const ScenarioFlags& f, const fs::path& out) {
    ScenarioConfig cfg = resolve(f);
    cfg.validate();
    const SensorModel sensor = cfg.sensor();
    Rng truth_rng(cfg.truth_seed);
    const GroundTruthTrack truth = simulate_ground_truth(cfg.init, cfg.motion_model(), cfg.steps, truth_rng);
    // Same stream as a full scenario run so the files line up.
    Rng rng(derive_seed(cfg.seed, 1));
    const std::vector<Measurement> zs = measure_track(truth, sensor, rng);
    std::vector<CartesianPoint> converted, truth_points;
    for (const Measurement& z : zs) converted.push_back(polar_to_cartesian(z, sensor));
    for (const KinematicState& s : truth.states) truth_points.push_back({s.x, s.y});

    fs::create_directories(out);
    write_text_file(out / "config.json", to_json(cfg).dump(2) + "\n");
    write_text_file(out / "ground_truth.csv", ground_truth_csv(truth));
    write_text_file(out / "measurements.csv", measurements_csv(zs, sensor));
    write_text_file(out / "windows.csv", windows_csv(build_windows(converted, truth_points, cfg.window)));
    print_json({{"out", out.string()}, {"steps", cfg.steps}});
}

void cmd_train(const std::string& windows, const ScenarioFlags& f, std::uint64_t seed, std::optional<std::size_t> rows,
               const fs::path& out) {
    std::vector<WindowSample> data = parse_windows(read_csv(windows));
    if (rows) {
        if (*rows < 1 || *rows > data.size()) {
            throw Error(ErrorKind::Config, "--rows must lie in [1, " + std::to_string(data.size()) + "]");
        }
        data.resize(*rows);
    }
    if (data.empty()) throw Error(ErrorKind::Config, windows + ": no window rows");
    TrainConfig tc;
    apply_train_flags(tc, f);
    tc.seed = seed;
    std::vector<std::size_t> sizes = kTrackerLayers;
    sizes.front() = static_cast<std::size_t>(data.front().inputs.size());
    const TrainResult r = train_best_of(sizes, data, tc);

    fs::create_directories(out);
    write_text_file(out / "params.txt", params_text(r.params));
    write_text_file(out / "cost_trace.csv", cost_trace_csv(r.trace));
    print_json({{"final_cost", r.final_cost}, {"init_seed", r.init_seed}, {"rows", data.size()}});
}

void cmd_track_ekf(const std::string& measurements, const ScenarioFlags& f, const fs::path& out) {
    const ScenarioConfig cfg = resolve(f);
    const SensorModel sensor = cfg.sensor();
    const std::vector<Measurement> zs = parse_measurements(read_csv(measurements));
    if (zs.empty()) throw Error(ErrorKind::Config, measurements + ": no measurements");
    const Track t = run_filter(zs, initial_estimate(zs.front(), sensor), cfg.motion_model(), sensor);
    fs::create_directories(out);
    write_text_file(out / "ekf_track.csv", track_csv(t));
    print_json({{"out", (out / "ekf_track.csv").string()}, {"steps", t.estimates.size()}});
}

// Scores either a trained network on a window table or an estimated track
// against a ground-truth track (rows matched on k).
void cmd_evaluate(const std::string& params, const std::string& windows, const std::string& track,
                  const std::string& truth, const std::string& out) {
    TrackComparison c;
    std::string predictions;
    if (!params.empty() && !windows.empty() && track.empty() && truth.empty()) {
        const MLPParams p = parse_params(read_text_file(params));
        const std::vector<WindowSample> rows = parse_windows(read_csv(windows));
        std::vector<Vector> inputs;
        std::vector<CartesianPoint> targets;
        for (const WindowSample& w : rows) {
            inputs.push_back(w.inputs);
            targets.push_back(w.target);
        }
        const std::vector<CartesianPoint> pred = predict_track(p, inputs);
        c = track_distance_sum(pred, targets);
        CsvWriter w({"row", "x", "y"});
        for (std::size_t i = 0; i < pred.size(); ++i) {
            w.row({std::to_string(i), format_double(pred[i].x), format_double(pred[i].y)});
        }
        predictions = w.str();
    } else if (!track.empty() && !truth.empty() && params.empty() && windows.empty()) {
        const IndexedPoints est = parse_points(read_csv(track));
        const IndexedPoints gt = parse_points(read_csv(truth));
        std::map<std::size_t, CartesianPoint> by_k;
        for (std::size_t i = 0; i < gt.k.size(); ++i) by_k[gt.k[i]] = gt.points[i];
        std::vector<CartesianPoint> matched_truth;
        for (std::size_t i = 0; i < est.k.size(); ++i) {
            const auto it = by_k.find(est.k[i]);
            if (it == by_k.end()) {
                throw Error(ErrorKind::Config, track + ": step k=" + std::to_string(est.k[i]) + " has no ground truth");
            }
            matched_truth.push_back(it->second);
        }
        c = track_distance_sum(est.points, matched_truth);
    } else {
        throw Error(ErrorKind::Config, "evaluate needs either --params with --windows, or --track with --truth");
    }
    const json metrics = metrics_json(c);
    if (!out.empty()) {
        fs::create_directories(out);
        write_text_file(fs::path(out) / "metrics.json", metrics.dump(2) + "\n");
        if (!predictions.empty()) write_text_file(fs::path(out) / "predictions.csv", predictions);
    }
    print_json(metrics);
}

void cmd_fixture(const std::string& table, const ScenarioFlags& f, std::uint64_t seed, std::size_t train_rows,
                 const std::string& out) {
    FixtureConfig cfg;
    cfg.train_rows = train_rows;
    apply_train_flags(cfg.train, f);
    cfg.train.seed = seed;
    const FixtureResult r = run_fixture(parse_windows(read_csv(table)), cfg);
    const json j = fixture_json(r);
    if (!out.empty()) {
        fs::create_directories(out);
        write_text_file(fs::path(out) / "fixture.json", j.dump(2) + "\n");
        write_text_file(fs::path(out) / "params.txt", params_text(r.training.params));
        write_text_file(fs::path(out) / "cost_trace.csv", cost_trace_csv(r.training.trace));
    }
    print_json(j);
}

void cmd_sweep(const std::string& config, std::optional<std::size_t> seeds, std::optional<std::size_t> jobs,
               const ScenarioFlags& f, const fs::path& out) {
    SweepConfig cfg = config.empty() ? default_sweep_config() : sweep_from_json(load_json(config));
    if (seeds) {
        cfg.seeds.clear();
        for (std::size_t s = 1; s <= *seeds; ++s) cfg.seeds.push_back(s);
    }
    override(cfg.jobs, jobs);
    apply_train_flags(cfg.base.train, f);
    const SweepSummary s = sweep(cfg);
    write_sweep(cfg, s, out);
    std::size_t failed = 0;
    for (const SweepRun& r : s.runs) failed += r.failure.empty() ? 0 : 1;
    print_json({{"out", out.string()}, {"runs", s.runs.size()}, {"failed_runs", failed},
                {"nn_inversions", count_inversions(s)}});
}

void cmd_run(const ScenarioFlags& f, const fs::path& out) {
    const ScenarioConfig cfg = resolve(f);
    const ScenarioResult r = run_scenario(cfg, out);
    print_json(scenario_metrics_json(r));
}

int fail(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bearing/range target tracking: EKF versus a sliding-window neural network"};
    app.require_subcommand(1);

    ScenarioFlags sim_f, train_f, ekf_f, fix_f, sweep_f, run_f;
    std::string out_dir;

    auto* sim = app.add_subcommand("simulate", "Simulate ground truth, measurements and window rows");
    add_scenario_flags(sim, sim_f, false);
    sim->add_option("--out", out_dir, "Output directory")->required();

    std::string windows_path;
    std::uint64_t train_seed = 0;
    std::optional<std::size_t> train_rows_opt;
    auto* tr = app.add_subcommand("train", "Train the tracking network on a window table");
    tr->add_option("--windows", windows_path, "Window CSV (X(M).1,...,X(G),Y(G))")->required();
    tr->add_option("--rows", train_rows_opt, "Use only the leading rows");
    tr->add_option("--seed", train_seed, "Initialization seed");
    add_train_flags(tr, train_f);
    tr->add_option("--out", out_dir, "Output directory")->required();

    std::string measurements_path;
    auto* ekf = app.add_subcommand("track-ekf", "Run the EKF over a measurement CSV");
    ekf->add_option("--measurements", measurements_path, "Measurement CSV (k,bearing_rad,range_m)")->required();
    add_scenario_flags(ekf, ekf_f, false);
    ekf->add_option("--out", out_dir, "Output directory")->required();

    std::string params_path, eval_windows, track_path, truth_path, eval_out;
    auto* ev = app.add_subcommand("evaluate", "Score a network or an estimated track against ground truth");
    ev->add_option("--params", params_path, "Network parameter file");
    ev->add_option("--windows", eval_windows, "Window CSV whose X(G),Y(G) columns are the truth");
    ev->add_option("--track", track_path, "Estimated track CSV with k,x,y columns");
    ev->add_option("--truth", truth_path, "Ground-truth CSV with k,x,y columns");
    ev->add_option("--out", eval_out, "Optional output directory");

    std::string fixture_table = "data/table2.csv", fixture_out;
    std::uint64_t fixture_seed = 0;
    std::size_t fixture_rows = 4;
    auto* fx = app.add_subcommand("fixture", "Train and score on a fixed window table");
    fx->add_option("--table", fixture_table, "Window CSV")->capture_default_str();
    fx->add_option("--train-rows", fixture_rows, "Leading rows used for training")->capture_default_str();
    fx->add_option("--seed", fixture_seed, "Base seed for restarts");
    add_train_flags(fx, fix_f);
    fx->add_option("--out", fixture_out, "Optional output directory");

    std::string sweep_config;
    std::optional<std::size_t> sweep_seeds, sweep_jobs;
    auto* sw = app.add_subcommand("sweep", "Measurement covariance sweep over ground truths and seeds");
    sw->add_option("--config", sweep_config, "Sweep config JSON");
    sw->add_option("--seeds", sweep_seeds, "Use seeds 1..N");
    sw->add_option("--jobs", sweep_jobs, "Worker threads");
    add_train_flags(sw, sweep_f);
    sw->add_option("--out", out_dir, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Full scenario: simulate, filter, train, score, write all artifacts");
    add_scenario_flags(run, run_f, true);
    run->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*sim) cmd_simulate(sim_f, out_dir);
        else if (*tr) cmd_train(windows_path, train_f, train_seed, train_rows_opt, out_dir);
        else if (*ekf) cmd_track_ekf(measurements_path, ekf_f, out_dir);
        else if (*ev) cmd_evaluate(params_path, eval_windows, track_path, truth_path, eval_out);
        else if (*fx) cmd_fixture(fixture_table, fix_f, fixture_seed, fixture_rows, fixture_out);
        else if (*sw) cmd_sweep(sweep_config, sweep_seeds, sweep_jobs, sweep_f, out_dir);
        else if (*run) cmd_run(run_f, out_dir);
    } catch (const Error& e) {
        return fail(to_string(e.kind()), e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}

#include "nntrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <set>
#include <thread>

#include "nntrack/csv.hpp"
#include "nntrack/io.hpp"

namespace nntrack {

using nlohmann::json;

namespace {

// Stream indices for derive_seed; fixed so artifacts replay from (config, seed).
constexpr std::uint64_t kMeasurementStream = 1;
constexpr std::uint64_t kResampleStream = 2;
constexpr std::uint64_t kNetworkStream = 3;
constexpr std::uint64_t kCrossTrackStream = 100;

Error config_error(const std::string& msg) { return Error(ErrorKind::Config, msg); }

std::vector<std::size_t> layers_for_window(std::size_t window) {
    std::vector<std::size_t> sizes = kTrackerLayers;
    sizes.front() = 2 * window;
    return sizes;
}

MeasuredTrack measure_and_filter(GroundTruthTrack truth, const ScenarioConfig& cfg, std::uint64_t measurement_seed) {
    const SensorModel sensor = cfg.sensor();
    MeasuredTrack t;
    t.truth = std::move(truth);
    Rng rng(measurement_seed);
    t.measurements = measure_track(t.truth, sensor, rng);
    t.converted.reserve(t.measurements.size());
    for (const Measurement& z : t.measurements) t.converted.push_back(polar_to_cartesian(z, sensor));

    std::vector<CartesianPoint> truth_points;
    for (const KinematicState& s : t.truth.states) truth_points.push_back({s.x, s.y});
    t.windows = build_windows(t.converted, truth_points, cfg.window);
    t.ekf = run_filter(t.measurements, initial_estimate(t.measurements.front(), sensor), cfg.motion_model(), sensor);
    return t;
}

GroundTruthTrack simulate_truth(const ScenarioConfig& cfg, std::uint64_t truth_seed) {
    Rng rng(truth_seed);
    return simulate_ground_truth(cfg.init, cfg.motion_model(), cfg.steps, rng);
}

std::vector<RowRef> rows_of(std::size_t track, std::size_t first, std::size_t count) {
    std::vector<RowRef> out;
    for (std::size_t r = first; r < first + count; ++r) out.push_back({track, r});
    return out;
}

CartesianPoint truth_at(const ScenarioData& data, const RowRef& ref, std::size_t window) {
    const KinematicState& s = data.tracks[ref.track].truth.states[ref.row + window - 1];
    return {s.x, s.y};
}

CartesianPoint ekf_at(const ScenarioData& data, const RowRef& ref, std::size_t window) {
    const StateEstimate& e = data.tracks[ref.track].ekf.estimates[ref.row + window - 1];
    return {e.mean(0), e.mean(1)};
}

std::vector<WindowSample> gather(const ScenarioData& data, const std::vector<RowRef>& refs) {
    std::vector<WindowSample> out;
    out.reserve(refs.size());
    for (const RowRef& r : refs) out.push_back(data.tracks[r.track].windows[r.row]);
    return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) throw config_error("unknown key '" + item.key() + "' in " + where);
    }
}

json state_json(const KinematicState& s) { return json::array({s.x, s.y, s.vx, s.vy}); }

KinematicState state_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw config_error("state must be [x, y, vx, vy]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

const char* to_string(SplitMode mode) {
    switch (mode) {
        case SplitMode::Fraction: return "fraction";
        case SplitMode::Explicit: return "explicit";
        case SplitMode::Resample: return "resample";
        case SplitMode::CrossTrack: return "cross-track";
    }
    return "fraction";
}

SplitMode split_mode_from_string(const std::string& s) {
    if (s == "fraction") return SplitMode::Fraction;
    if (s == "explicit") return SplitMode::Explicit;
    if (s == "resample") return SplitMode::Resample;
    if (s == "cross-track") return SplitMode::CrossTrack;
    throw config_error("unknown split mode '" + s + "' (fraction, explicit, resample, cross-track)");
}

void ScenarioConfig::validate() const {
    if (steps < 1) throw config_error("steps must be at least 1");
    if (!(dt > 0.0)) throw config_error("dt must be positive");
    if (!(q >= 0.0)) throw config_error("q must be non-negative");
    if (!(r_bearing >= 0.0) || !(r_range >= 0.0)) throw config_error("measurement variances must be non-negative");
    if (window < 1) throw config_error("window must be at least 1");
    if (steps < window) throw config_error("steps must be at least the window length");
    if (split.mode == SplitMode::Fraction && !(split.train_fraction > 0.0 && split.train_fraction < 1.0)) {
        throw config_error("train_fraction must lie in (0, 1)");
    }
    if (!(train.learning_rate > 0.0)) throw config_error("learning_rate must be positive");
    if (train.iterations < 1) throw config_error("iterations must be at least 1");
    if (train.trace_every < 1) throw config_error("trace_every must be at least 1");
    if (train.restarts < 1) throw config_error("restarts must be at least 1");
}

json to_json(const ScenarioConfig& cfg) {
    return {
        {"seed", cfg.seed},
        {"truth_seed", cfg.truth_seed},
        {"steps", cfg.steps},
        {"dt", cfg.dt},
        {"q", cfg.q},
        {"init", state_json(cfg.init)},
        {"sensor", json::array({cfg.sensor_position.x, cfg.sensor_position.y})},
        {"r_bearing", cfg.r_bearing},
        {"r_range", cfg.r_range},
        {"window", cfg.window},
        {"split",
         {{"mode", to_string(cfg.split.mode)},
          {"train_fraction", cfg.split.train_fraction},
          {"train_rows", cfg.split.train_rows},
          {"test_rows", cfg.split.test_rows},
          {"cross_tracks", cfg.split.cross_tracks}}},
        {"train",
         {{"learning_rate", cfg.train.learning_rate},
          {"iterations", cfg.train.iterations},
          {"trace_every", cfg.train.trace_every},
          {"restarts", cfg.train.restarts},
          {"screen_iterations", cfg.train.screen_iterations}}},
        {"normalize", cfg.normalize},
    };
}

ScenarioConfig scenario_from_json(const json& j, ScenarioConfig cfg) {
    try {
        reject_unknown(j, {"seed", "truth_seed", "steps", "dt", "q", "init", "sensor", "r_bearing", "r_range", "window",
                           "split", "train", "normalize"},
                       "scenario config");
        cfg.seed = get_or(j, "seed", cfg.seed);
        cfg.truth_seed = get_or(j, "truth_seed", cfg.truth_seed);
        cfg.steps = get_or(j, "steps", cfg.steps);
        cfg.dt = get_or(j, "dt", cfg.dt);
        cfg.q = get_or(j, "q", cfg.q);
        if (j.contains("init")) cfg.init = state_from_json(j.at("init"));
        if (j.contains("sensor")) {
            const json& s = j.at("sensor");
            if (!s.is_array() || s.size() != 2) throw config_error("sensor must be [x, y]");
            cfg.sensor_position = {s[0].get<double>(), s[1].get<double>()};
        }
        cfg.r_bearing = get_or(j, "r_bearing", cfg.r_bearing);
        cfg.r_range = get_or(j, "r_range", cfg.r_range);
        cfg.window = get_or(j, "window", cfg.window);
        cfg.normalize = get_or(j, "normalize", cfg.normalize);
        if (j.contains("split")) {
            const json& s = j.at("split");
            reject_unknown(s, {"mode", "train_fraction", "train_rows", "test_rows", "cross_tracks"}, "split");
            if (s.contains("mode")) cfg.split.mode = split_mode_from_string(s.at("mode").get<std::string>());
            cfg.split.train_fraction = get_or(s, "train_fraction", cfg.split.train_fraction);
            cfg.split.train_rows = get_or(s, "train_rows", cfg.split.train_rows);
            cfg.split.test_rows = get_or(s, "test_rows", cfg.split.test_rows);
            cfg.split.cross_tracks = get_or(s, "cross_tracks", cfg.split.cross_tracks);
        }
        if (j.contains("train")) {
            const json& t = j.at("train");
            reject_unknown(t, {"learning_rate", "iterations", "trace_every", "restarts", "screen_iterations"}, "train");
            cfg.train.learning_rate = get_or(t, "learning_rate", cfg.train.learning_rate);
            cfg.train.iterations = get_or(t, "iterations", cfg.train.iterations);
            cfg.train.trace_every = get_or(t, "trace_every", cfg.train.trace_every);
            cfg.train.restarts = get_or(t, "restarts", cfg.train.restarts);
            cfg.train.screen_iterations = get_or(t, "screen_iterations", cfg.train.screen_iterations);
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("invalid config value: ") + e.what());
    }
    return cfg;
}

ScenarioData build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioData data;
    data.tracks.push_back(
        measure_and_filter(simulate_truth(cfg, cfg.truth_seed), cfg, derive_seed(cfg.seed, kMeasurementStream)));
    const std::size_t rows = data.tracks[0].windows.size();
    const std::size_t gap = cfg.window - 1;  // rows skipped so test windows share no measurement with training

    switch (cfg.split.mode) {
        case SplitMode::Fraction: {
            if (rows <= gap + 1) throw config_error("too few window rows for a train/test split");
            const std::size_t usable = rows - gap;
            const auto wanted = static_cast<std::size_t>(std::llround(cfg.split.train_fraction * double(usable)));
            const std::size_t train = std::clamp<std::size_t>(wanted, 1, usable - 1);
            data.train = rows_of(0, 0, train);
            data.test = rows_of(0, train + gap, usable - train);
            break;
        }
        case SplitMode::Explicit: {
            const std::size_t need = cfg.split.train_rows + gap + cfg.split.test_rows;
            if (cfg.split.train_rows < 1 || cfg.split.test_rows < 1 || need > rows) {
                throw config_error("explicit split needs " + std::to_string(need) + " window rows (train " +
                                   std::to_string(cfg.split.train_rows) + ", gap " + std::to_string(gap) +
                                   ", test " + std::to_string(cfg.split.test_rows) + "), scenario has " +
                                   std::to_string(rows));
            }
            data.train = rows_of(0, 0, cfg.split.train_rows);
            data.test = rows_of(0, cfg.split.train_rows + gap, cfg.split.test_rows);
            break;
        }
        case SplitMode::Resample: {
            data.tracks.push_back(
                measure_and_filter(data.tracks[0].truth, cfg, derive_seed(cfg.seed, kResampleStream)));
            const std::size_t test = std::min(cfg.split.test_rows, rows);
            if (test < 1) throw config_error("resample split needs at least one test row");
            data.train = rows_of(0, 0, rows);
            data.test = rows_of(1, 0, test);
            break;
        }
        case SplitMode::CrossTrack: {
            if (cfg.split.cross_tracks < 1) throw config_error("cross-track split needs at least one training track");
            for (std::size_t i = 0; i < cfg.split.cross_tracks; ++i) {
                data.tracks.push_back(measure_and_filter(simulate_truth(cfg, derive_seed(cfg.truth_seed, kCrossTrackStream + i)),
                                                         cfg, derive_seed(cfg.seed, kCrossTrackStream + i)));
                auto rows_i = rows_of(i + 1, 0, data.tracks.back().windows.size());
                data.train.insert(data.train.end(), rows_i.begin(), rows_i.end());
            }
            const std::size_t test = std::min(cfg.split.test_rows, rows);
            if (test < 1) throw config_error("cross-track split needs at least one test row");
            data.test = rows_of(0, 0, test);
            break;
        }
    }
    if (data.train.empty() || data.test.empty()) throw config_error("split produced an empty train or test set");
    check_disjoint(data, cfg.window);
    return data;
}

void check_disjoint(const ScenarioData& data, std::size_t window) {
    // Each (track, measurement index) used by a training window.
    std::set<std::pair<std::size_t, std::size_t>> used;
    for (const RowRef& r : data.train) {
        for (std::size_t i = 0; i < window; ++i) used.insert({r.track, r.row + i});
    }
    // Tracks that share a measurement draw are the same MeasuredTrack, so the
    // track index identifies the draw.
    for (const RowRef& r : data.test) {
        for (std::size_t i = 0; i < window; ++i) {
            if (used.count({r.track, r.row + i})) {
                throw Error(ErrorKind::Config, "test window " + std::to_string(r.row) + " of track " +
                                                   std::to_string(r.track) + " reuses a training measurement");
            }
        }
    }
}

ScenarioResult evaluate_scenario(const ScenarioConfig& cfg) {
    ScenarioResult res;
    res.data = build_scenario(cfg);
    const std::size_t n = cfg.window;

    std::vector<WindowSample> train_set = gather(res.data, res.data.train);
    const std::vector<WindowSample> test_set = gather(res.data, res.data.test);

    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.seed, kNetworkStream);
    if (cfg.normalize) {
        const InputScaling scaling = fit_input_scaling(train_set);
        res.training = train_best_of(layers_for_window(n), apply_input_scaling(train_set, scaling), tc);
        res.training.params = fold_input_scaling(res.training.params, scaling);
    } else {
        res.training = train_best_of(layers_for_window(n), train_set, tc);
    }

    auto inputs_of = [](const std::vector<WindowSample>& s) {
        std::vector<Vector> v;
        for (const WindowSample& w : s) v.push_back(w.inputs);
        return v;
    };
    res.nn_train = predict_track(res.training.params, inputs_of(train_set));
    res.nn_test = predict_track(res.training.params, inputs_of(test_set));

    auto points = [&](const std::vector<RowRef>& refs, auto&& at) {
        std::vector<CartesianPoint> v;
        for (const RowRef& r : refs) v.push_back(at(res.data, r, n));
        return v;
    };
    const auto truth_train = points(res.data.train, truth_at);
    const auto truth_test = points(res.data.test, truth_at);
    res.nn_train_metrics = track_distance_sum(res.nn_train, truth_train);
    res.nn_test_metrics = track_distance_sum(res.nn_test, truth_test);
    res.ekf_train_metrics = track_distance_sum(points(res.data.train, ekf_at), truth_train);
    res.ekf_test_metrics = track_distance_sum(points(res.data.test, ekf_at), truth_test);
    return res;
}

json scenario_metrics_json(const ScenarioResult& r) {
    return {
        {"train_rows", r.data.train.size()},
        {"test_rows", r.data.test.size()},
        {"final_cost", r.training.final_cost},
        {"init_seed", r.training.init_seed},
        {"nn_train", metrics_json(r.nn_train_metrics)},
        {"nn_test", metrics_json(r.nn_test_metrics)},
        {"ekf_train", metrics_json(r.ekf_train_metrics)},
        {"ekf_test", metrics_json(r.ekf_test_metrics)},
    };
}

void write_scenario(const ScenarioConfig& cfg, const ScenarioResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const SensorModel sensor = cfg.sensor();
    write_text_file(dir / "config.json", to_json(cfg).dump(2) + "\n");

    for (std::size_t t = 0; t < result.data.tracks.size(); ++t) {
        const MeasuredTrack& track = result.data.tracks[t];
        const std::string suffix = t == 0 ? "" : "_t" + std::to_string(t);
        write_text_file(dir / ("ground_truth" + suffix + ".csv"), ground_truth_csv(track.truth));
        write_text_file(dir / ("measurements" + suffix + ".csv"), measurements_csv(track.measurements, sensor));
        write_text_file(dir / ("windows" + suffix + ".csv"), windows_csv(track.windows));
        write_text_file(dir / ("ekf_track" + suffix + ".csv"), track_csv(track.ekf));
    }

    CsvWriter nn({"k", "x", "y", "set", "track"});
    auto emit = [&](const std::vector<RowRef>& refs, const std::vector<CartesianPoint>& pts, const char* label) {
        for (std::size_t i = 0; i < refs.size(); ++i) {
            nn.row({std::to_string(refs[i].row + cfg.window - 1), format_double(pts[i].x), format_double(pts[i].y),
                    label, std::to_string(refs[i].track)});
        }
    };
    emit(result.data.train, result.nn_train, "train");
    emit(result.data.test, result.nn_test, "test");
    write_text_file(dir / "nn_track.csv", nn.str());

    write_text_file(dir / "metrics.json", scenario_metrics_json(result).dump(2) + "\n");
    write_text_file(dir / "cost_trace.csv", cost_trace_csv(result.training.trace));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& dir) {
    ScenarioResult r = evaluate_scenario(cfg);
    write_scenario(cfg, r, dir);
    return r;
}

FixtureResult run_fixture(const std::vector<WindowSample>& table, const FixtureConfig& cfg) {
    if (cfg.train_rows < 1 || table.size() <= cfg.train_rows) {
        throw Error(ErrorKind::Config, "fixture has " + std::to_string(table.size()) + " rows; need more than " +
                                           std::to_string(cfg.train_rows) + " to train and test");
    }
    const std::vector<WindowSample> train_set(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(cfg.train_rows));
    const std::vector<WindowSample> test_set(table.begin() + static_cast<std::ptrdiff_t>(cfg.train_rows), table.end());

    std::vector<std::size_t> sizes = cfg.layer_sizes;
    sizes.front() = static_cast<std::size_t>(table.front().inputs.size());

    FixtureResult res;
    res.training = train_best_of(sizes, train_set, cfg.train);

    auto split = [](const std::vector<WindowSample>& s, std::vector<Vector>& in, std::vector<CartesianPoint>& truth) {
        for (const WindowSample& w : s) {
            in.push_back(w.inputs);
            truth.push_back(w.target);
        }
    };
    std::vector<Vector> train_in, test_in;
    std::vector<CartesianPoint> train_truth, test_truth;
    split(train_set, train_in, train_truth);
    split(test_set, test_in, test_truth);
    res.train_predictions = predict_track(res.training.params, train_in);
    res.test_predictions = predict_track(res.training.params, test_in);
    res.train_metrics = track_distance_sum(res.train_predictions, train_truth);
    res.test_metrics = track_distance_sum(res.test_predictions, test_truth);
    return res;
}

json fixture_json(const FixtureResult& r) {
    auto pts = [](const std::vector<CartesianPoint>& v) {
        json a = json::array();
        for (const CartesianPoint& p : v) a.push_back({p.x, p.y});
        return a;
    };
    return {
        {"final_cost", r.training.final_cost},
        {"init_seed", r.training.init_seed},
        {"train", metrics_json(r.train_metrics)},
        {"test", metrics_json(r.test_metrics)},
        {"train_predictions", pts(r.train_predictions)},
        {"test_predictions", pts(r.test_predictions)},
    };
}

// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
    if (levels.empty()) throw config_error("sweep needs at least one covariance level");
    if (ground_truths.empty()) throw config_error("sweep needs at least one ground truth");
    if (seeds.empty()) throw config_error("sweep needs at least one seed");
    for (const CovarianceLevel& l : levels) {
        if (!(l.bearing >= 0.0) || !(l.range >= 0.0)) throw config_error("covariance levels must be non-negative");
    }
    base.validate();
}

SweepConfig default_sweep_config() {
    SweepConfig cfg;
    cfg.levels = {{0.01, 0.3}, {0.11, 0.5}, {0.15, 0.7}, {0.2, 1.0}, {0.3, 1.5}};
    cfg.ground_truths = {
        {"gt1", 11, {0.0, 0.0, 1.0, 1.0}},
        {"gt2", 12, {0.0, 0.0, 1.0, 2.0}},
        {"gt3", 13, {0.0, 0.0, 1.5, 0.5}},
    };
    for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
    cfg.base.steps = 23;
    cfg.base.split.mode = SplitMode::Resample;
    cfg.base.split.test_rows = 10;
    cfg.base.train.iterations = 20000;
    cfg.base.train.restarts = 3;
    // Standardized inputs keep per-seed training outcomes comparable across noise levels.
    cfg.base.normalize = true;
    return cfg;
}

json to_json(const SweepConfig& cfg) {
    json levels = json::array();
    for (const CovarianceLevel& l : cfg.levels) levels.push_back({l.bearing, l.range});
    json gts = json::array();
    for (const GroundTruthSpec& g : cfg.ground_truths) {
        gts.push_back({{"name", g.name}, {"truth_seed", g.truth_seed}, {"init", state_json(g.init)}});
    }
    return {{"levels", levels}, {"ground_truths", gts}, {"seeds", cfg.seeds}, {"base", to_json(cfg.base)},
            {"jobs", cfg.jobs}};
}

SweepConfig sweep_from_json(const json& j) {
    SweepConfig cfg = default_sweep_config();
    try {
        reject_unknown(j, {"levels", "ground_truths", "seeds", "base", "jobs"}, "sweep config");
        if (j.contains("levels")) {
            cfg.levels.clear();
            for (const json& l : j.at("levels")) {
                if (!l.is_array() || l.size() != 2) throw config_error("each level must be [bearing, range]");
                cfg.levels.push_back({l[0].get<double>(), l[1].get<double>()});
            }
        }
        if (j.contains("ground_truths")) {
            cfg.ground_truths.clear();
            for (const json& g : j.at("ground_truths")) {
                reject_unknown(g, {"name", "truth_seed", "init"}, "ground truth");
                GroundTruthSpec spec;
                spec.name = g.at("name").get<std::string>();
                spec.truth_seed = g.at("truth_seed").get<std::uint64_t>();
                spec.init = g.contains("init") ? state_from_json(g.at("init")) : cfg.base.init;
                cfg.ground_truths.push_back(spec);
            }
        }
        if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("base")) cfg.base = scenario_from_json(j.at("base"), cfg.base);
        cfg.jobs = get_or(j, "jobs", cfg.jobs);
    } catch (const json::exception& e) {
        throw config_error(std::string("invalid sweep config value: ") + e.what());
    }
    return cfg;
}

SweepSummary sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepSummary summary;
    for (const GroundTruthSpec& g : cfg.ground_truths) summary.gt_names.push_back(g.name);
    summary.level_count = cfg.levels.size();

    for (std::size_t g = 0; g < cfg.ground_truths.size(); ++g) {
        for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
            for (std::uint64_t seed : cfg.seeds) summary.runs.push_back({g, l, seed, {}, {}, {}});
        }
    }

    auto evaluate = [&](SweepRun& run) {
        ScenarioConfig sc = cfg.base;
        sc.truth_seed = cfg.ground_truths[run.gt].truth_seed;
        sc.init = cfg.ground_truths[run.gt].init;
        sc.r_bearing = cfg.levels[run.level].bearing;
        sc.r_range = cfg.levels[run.level].range;
        sc.seed = run.seed;
        try {
            const ScenarioResult r = evaluate_scenario(sc);
            run.nn_distance = r.nn_test_metrics.distance_sum;
            run.ekf_distance = r.ekf_test_metrics.distance_sum;
        } catch (const Error& e) {
            run.failure = e.what();
        }
    };

    const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, summary.runs.size()));
    if (jobs == 1) {
        for (SweepRun& run : summary.runs) evaluate(run);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < summary.runs.size(); i = next++) evaluate(summary.runs[i]);
            });
        }
        for (std::thread& th : pool) th.join();
    }

    // Reduction in grid order keeps the summary independent of scheduling.
    summary.cells.assign(cfg.ground_truths.size(), std::vector<SweepCell>(cfg.levels.size()));
    std::vector<std::vector<double>> nn_sum(cfg.ground_truths.size(), std::vector<double>(cfg.levels.size(), 0.0));
    auto ekf_sum = nn_sum;
    for (const SweepRun& run : summary.runs) {
        SweepCell& cell = summary.cells[run.gt][run.level];
        if (!run.failure.empty()) {
            std::cerr << "warning: sweep cell " << summary.gt_names[run.gt] << "/cov" << run.level + 1 << " seed "
                      << run.seed << " failed: " << run.failure << "\n";
        }
        if (run.nn_distance && std::isfinite(*run.nn_distance)) {
            nn_sum[run.gt][run.level] += *run.nn_distance;
            ++cell.nn_count;
        }
        if (run.ekf_distance && std::isfinite(*run.ekf_distance)) {
            ekf_sum[run.gt][run.level] += *run.ekf_distance;
            ++cell.ekf_count;
        }
    }
    for (std::size_t g = 0; g < summary.cells.size(); ++g) {
        for (std::size_t l = 0; l < summary.level_count; ++l) {
            SweepCell& cell = summary.cells[g][l];
            if (cell.nn_count) cell.nn_mean = nn_sum[g][l] / double(cell.nn_count);
            if (cell.ekf_count) cell.ekf_mean = ekf_sum[g][l] / double(cell.ekf_count);
        }
    }
    return summary;
}

std::string sweep_long_csv(const SweepSummary& summary) {
    CsvWriter w({"gt", "cov_level", "method", "distance_sum"});
    auto value = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("missing"); };
    for (std::size_t g = 0; g < summary.cells.size(); ++g) {
        for (std::size_t l = 0; l < summary.level_count; ++l) {
            const std::string level = "cov" + std::to_string(l + 1);
            w.row({summary.gt_names[g], level, "nn", value(summary.cells[g][l].nn_mean)});
            w.row({summary.gt_names[g], level, "ekf", value(summary.cells[g][l].ekf_mean)});
        }
    }
    return w.str();
}

std::string sweep_runs_csv(const SweepSummary& summary) {
    CsvWriter w({"gt", "cov_level", "seed", "method", "distance_sum"});
    auto value = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("missing"); };
    for (const SweepRun& run : summary.runs) {
        const std::string level = "cov" + std::to_string(run.level + 1);
        w.row({summary.gt_names[run.gt], level, std::to_string(run.seed), "nn", value(run.nn_distance)});
        w.row({summary.gt_names[run.gt], level, std::to_string(run.seed), "ekf", value(run.ekf_distance)});
    }
    return w.str();
}

std::vector<std::size_t> count_inversions(const SweepSummary& summary) {
    std::vector<std::size_t> out;
    for (const auto& row : summary.cells) {
        std::size_t inversions = 0;
        for (std::size_t l = 1; l < row.size(); ++l) {
            // A missing mean cannot certify the trend, so it counts against it.
            if (!row[l].nn_mean || !row[l - 1].nn_mean || *row[l].nn_mean < *row[l - 1].nn_mean) ++inversions;
        }
        out.push_back(inversions);
    }
    return out;
}

void write_sweep(const SweepConfig& cfg, const SweepSummary& summary, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / "config.json", to_json(cfg).dump(2) + "\n");
    write_text_file(dir / "sweep_long.csv", sweep_long_csv(summary));
    write_text_file(dir / "sweep_runs.csv", sweep_runs_csv(summary));

    json grid = json::array();
    for (std::size_t g = 0; g < summary.cells.size(); ++g) {
        json levels = json::array();
        for (std::size_t l = 0; l < summary.level_count; ++l) {
            const SweepCell& c = summary.cells[g][l];
            levels.push_back({{"cov_level", "cov" + std::to_string(l + 1)},
                              {"nn_distance_sum", c.nn_mean ? json(*c.nn_mean) : json(nullptr)},
                              {"ekf_distance_sum", c.ekf_mean ? json(*c.ekf_mean) : json(nullptr)},
                              {"nn_runs", c.nn_count},
                              {"ekf_runs", c.ekf_count}});
        }
        grid.push_back({{"gt", summary.gt_names[g]}, {"levels", levels}});
    }
    write_text_file(dir / "summary.json", json{{"grid", grid}, {"nn_inversions", count_inversions(summary)}}.dump(2) + "\n");
}

}  // namespace nntrack

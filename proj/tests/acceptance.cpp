// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "nntrack/csv.hpp"
#include "nntrack/ekf.hpp"
#include "nntrack/harness.hpp"
#include "nntrack/io.hpp"
#include "test_support.hpp"

using namespace nntrack;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

// Every tolerance and budget used below.
constexpr double kFixtureCostMax = 0.05;
constexpr double kFixtureMseMax = 0.05;
constexpr double kFixtureSeconds = 10.0;
constexpr int kGradientDraws = 100;
constexpr double kGradientRelErr = 1e-5;
constexpr double kGradientStep = 1e-6;
constexpr double kKinkMargin = 1e-3;
constexpr double kGradientSeconds = 5.0;
constexpr int kJacobianDraws = 100;
constexpr double kJacobianRelErr = 1e-5;
constexpr double kJacobianSeconds = 1.0;
constexpr int kLinearKfSteps = 50;
constexpr double kLinearKfTol = 1e-12;
constexpr int kHealthSeeds = 100;
constexpr double kPsdFloor = -1e-9;
constexpr int kLowNoiseSeeds = 10;
constexpr int kLowNoiseWinsRequired = 8;
constexpr std::size_t kMaxInversions = 1;
constexpr double kSweepSeconds = 300.0;
constexpr int kRoundTripDraws = 10000;
constexpr double kRoundTripTol = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Outcome fixture_training() {
    const auto t0 = std::chrono::steady_clock::now();
    const FixtureResult r = run_fixture(parse_windows(read_csv(NNTRACK_TABLE2_FIXTURE)));
    const double secs = seconds_since(t0);
    const bool ok = r.training.final_cost <= kFixtureCostMax && r.train_metrics.mse <= kFixtureMseMax &&
                    secs < kFixtureSeconds;
    return {ok, "final_cost=" + fmt(r.training.final_cost) + " train_mse=" + fmt(r.train_metrics.mse) +
                    " seconds=" + fmt(secs)};
}

Outcome gradient_oracle() {
    using testing::naive_cost;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    double worst = 0.0;
    int draws = 0, rejected = 0;
    while (draws < kGradientDraws) {
        MLPParams p = init_params(kTrackerLayers, rng);
        for (auto& b : p.biases) b = testing::random_matrix(rng, b.size(), 1, -0.5, 0.5);
        std::vector<WindowSample> data;
        std::vector<Vector> xs, ts;
        for (int s = 0; s < 5; ++s) {
            const Vector x = testing::random_matrix(rng, 6, 1);
            const CartesianPoint t{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            data.push_back({x, t});
            xs.push_back(x);
            ts.push_back((Vector(2) << t.x, t.y).finished());
        }
        if (testing::min_hidden_margin(p, xs) < kKinkMargin) {
            ++rejected;
            continue;
        }
        ++draws;
        const Gradients g = backward(p, forward(p, stack_inputs(data)), stack_targets(data));
        auto central = [&](auto&& slot) {
            MLPParams up = p, down = p;
            slot(up) += kGradientStep;
            slot(down) -= kGradientStep;
            return (naive_cost(up, xs, ts) - naive_cost(down, xs, ts)) / (2.0 * kGradientStep);
        };
        for (std::size_t l = 0; l < p.layer_count(); ++l) {
            Matrix nw(p.weights[l].rows(), p.weights[l].cols());
            for (Eigen::Index i = 0; i < nw.size(); ++i) {
                nw(i) = central([&](MLPParams& q) -> double& { return q.weights[l](i); });
            }
            Vector nb(p.biases[l].size());
            for (Eigen::Index i = 0; i < nb.size(); ++i) {
                nb(i) = central([&](MLPParams& q) -> double& { return q.biases[l](i); });
            }
            worst = std::max({worst, testing::relative_error(g.weights[l], nw), testing::relative_error(g.biases[l], nb)});
        }
    }
    const double secs = seconds_since(t0);
    return {worst < kGradientRelErr && secs < kGradientSeconds,
            "max_rel_err=" + fmt(worst) + " draws=" + std::to_string(draws) + " rejected=" + std::to_string(rejected) +
                " seconds=" + fmt(secs)};
}

Outcome jacobian_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(7);
    const SensorModel sensor;
    double worst = 0.0;
    int draws = 0;
    while (draws < kJacobianDraws) {
        const Vector s = KinematicState{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-3, 3),
                                        rng.uniform(-3, 3)}
                             .to_vector();
        if (std::hypot(s(0) - sensor.position.x, s(1) - sensor.position.y) < 1.0) continue;
        ++draws;
        const Matrix analytic = measurement_jacobian(KinematicState::from_vector(s), sensor);
        const Matrix numeric = finite_diff_jacobian([&](const Vector& v) { return bearing_range(v, sensor); }, s);
        worst = std::max(worst, testing::row_relative_error(analytic, numeric));
    }
    const double secs = seconds_since(t0);
    return {worst < kJacobianRelErr && secs < kJacobianSeconds, "max_rel_err=" + fmt(worst) + " seconds=" + fmt(secs)};
}

Outcome linear_kf_equivalence() {
    Rng rng(31);
    const MotionModel model = make_cv_model();
    const PositionSensor sensor{0.5 * Matrix::Identity(2, 2)};
    Rng truth_rng(5);
    const GroundTruthTrack truth = simulate_ground_truth({0, 0, 1, 1}, model, kLinearKfSteps, truth_rng);
    std::vector<CartesianPoint> zs;
    for (const KinematicState& s : truth.states) {
        const Vector noise = sample_mvn(rng, Vector::Zero(2), sensor.R);
        zs.push_back({s.x + noise(0), s.y + noise(1)});
    }
    StateEstimate init;
    init.mean = Vector::Zero(4);
    init.cov = 10.0 * Matrix::Identity(4, 4);
    const Track track = run_filter(zs, init, model, sensor);

    Matrix H = Matrix::Zero(2, 4);
    H(0, 0) = H(1, 1) = 1.0;
    Vector x = init.mean;
    Matrix P = init.cov;
    double worst = 0.0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        x = model.A * x;
        P = model.A * P * model.A.transpose() + model.Q;
        P = 0.5 * (P + P.transpose());
        const Matrix S = H * P * H.transpose() + sensor.R;
        const Matrix K = P * H.transpose() * S.inverse();
        x = x + K * ((Vector(2) << zs[i].x, zs[i].y).finished() - H * x);
        P = P - K * S * K.transpose();
        P = 0.5 * (P + P.transpose());
        worst = std::max({worst, (track.estimates[i].mean - x).cwiseAbs().maxCoeff(),
                          (track.estimates[i].cov - P).cwiseAbs().maxCoeff()});
    }
    return {worst <= kLinearKfTol, "max_abs_diff=" + fmt(worst) + " steps=" + std::to_string(zs.size())};
}

Outcome filter_health() {
    const MotionModel model = make_cv_model();
    const SensorModel sensor;
    double min_eig = INFINITY;
    std::size_t bad_bearing = 0, checked = 0;
    for (int seed = 1; seed <= kHealthSeeds; ++seed) {
        Rng truth_rng(derive_seed(seed, 0));
        Rng meas_rng(derive_seed(seed, 1));
        const GroundTruthTrack truth = simulate_ground_truth({0, 0, 1, 1}, model, 23, truth_rng);
        const std::vector<Measurement> zs = measure_track(truth, sensor, meas_rng);
        const Track t = run_filter(zs, initial_estimate(zs.front(), sensor), model, sensor);
        for (std::size_t i = 0; i < t.estimates.size(); ++i) {
            min_eig = std::min(min_eig, min_eigenvalue(t.estimates[i].cov));
            const double b = t.innovations[i](0);
            if (!(b > -pi && b <= pi)) ++bad_bearing;
            ++checked;
        }
    }
    return {min_eig >= kPsdFloor && bad_bearing == 0,
            "min_eigenvalue=" + fmt(min_eig) + " bad_bearings=" + std::to_string(bad_bearing) +
                " updates=" + std::to_string(checked)};
}

Outcome low_noise_superiority() {
    ScenarioConfig cfg;
    cfg.r_bearing = 0.001;
    cfg.r_range = 0.001;
    cfg.split.mode = SplitMode::Explicit;
    cfg.split.train_rows = 15;
    cfg.split.test_rows = 4;
    cfg.train.iterations = 500000;
    cfg.train.restarts = 10;
    cfg.train.screen_iterations = 20000;
    int wins = 0;
    std::string per_seed;
    for (int seed = 1; seed <= kLowNoiseSeeds; ++seed) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        const ScenarioResult r = evaluate_scenario(cfg);
        const bool win = r.nn_train_metrics.distance_sum < r.ekf_train_metrics.distance_sum;
        wins += win ? 1 : 0;
        per_seed += " s" + std::to_string(seed) + "=" + fmt(r.nn_train_metrics.distance_sum) + "/" +
                    fmt(r.ekf_train_metrics.distance_sum);
    }
    return {wins >= kLowNoiseWinsRequired,
            "nn_wins=" + std::to_string(wins) + "/" + std::to_string(kLowNoiseSeeds) + " (nn/ekf)" + per_seed};
}

Outcome covariance_monotonicity() {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepConfig cfg = default_sweep_config();
    const SweepSummary s = sweep(cfg);
    const double secs = seconds_since(t0);
    const std::vector<std::size_t> inv = count_inversions(s);
    bool ok = secs < kSweepSeconds && cfg.seeds.size() >= 10;
    std::string detail;
    for (std::size_t g = 0; g < inv.size(); ++g) {
        ok = ok && inv[g] <= kMaxInversions;
        detail += s.gt_names[g] + "_inversions=" + std::to_string(inv[g]) + " [";
        for (std::size_t l = 0; l < s.level_count; ++l) {
            const auto& m = s.cells[g][l].nn_mean;
            detail += (l ? " " : "") + (m ? fmt(*m) : std::string("missing"));
        }
        detail += "] ";
    }
    return {ok, detail + "seconds=" + fmt(secs)};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + NNTRACK_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "nntrack_acceptance_determinism";
    fs::remove_all(root);
    const std::string table = NNTRACK_TABLE2_FIXTURE;
    for (const char* tag : {"a", "b"}) {
        const fs::path d = root / tag;
        const std::vector<std::string> commands{
            "simulate --seed 3 --out " + (d / "simulate").string(),
            "track-ekf --measurements " + (d / "simulate" / "measurements.csv").string() + " --out " +
                (d / "track-ekf").string(),
            "train --windows " + table + " --rows 4 --iterations 2000 --restarts 3 --seed 5 --out " +
                (d / "train").string(),
            "evaluate --params " + (d / "train" / "params.txt").string() + " --windows " + table + " --out " +
                (d / "evaluate").string(),
            "fixture --table " + table + " --iterations 2000 --restarts 3 --out " + (d / "fixture").string(),
            "sweep --seeds 1 --iterations 200 --restarts 1 --out " + (d / "sweep").string(),
        };
        for (const std::string& c : commands) {
            if (run_cli(c) != 0) return {false, "command failed: " + c};
        }
    }
    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
        if (!fs::exists(other) || read_text_file(entry.path()) != read_text_file(other)) {
            return {false, "differs: " + fs::relative(entry.path(), root / "a").string()};
        }
        ++files;
    }
    return {files > 0, "identical_files=" + std::to_string(files) + " verbs=6"};
}

Outcome conversion_round_trip() {
    Rng rng(99);
    const SensorModel sensor;
    double worst = 0.0;
    for (int i = 0; i < kRoundTripDraws; ++i) {
        const Measurement z{rng.uniform(-pi, pi), rng.uniform(0.1, 200.0), 0};
        const Measurement back = cartesian_to_polar(polar_to_cartesian(z, sensor), sensor);
        worst = std::max({worst, std::abs(wrap_angle(back.bearing - z.bearing)),
                          std::abs(back.range - z.range) / std::max(1.0, z.range)});
    }
    return {worst <= kRoundTripTol, "max_err=" + fmt(worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"fixture training", fixture_training},
        {"gradient oracle", gradient_oracle},
        {"jacobian oracle", jacobian_oracle},
        {"linear kf equivalence", linear_kf_equivalence},
        {"filter health", filter_health},
        {"low-noise superiority", low_noise_superiority},
        {"covariance monotonicity", covariance_monotonicity},
        {"determinism", determinism},
        {"conversion round-trip", conversion_round_trip},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

#include "nntrack/neural.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nntrack {

std::vector<WindowSample> build_windows(const std::vector<CartesianPoint>& points,
                                        const std::vector<CartesianPoint>& truth, std::size_t n) {
    if (points.size() != truth.size()) {
        throw Error(ErrorKind::Dimension, "build_windows: " + std::to_string(points.size()) +
                                              " points but " + std::to_string(truth.size()) + " truth points");
    }
    const std::vector<Vector> inputs = build_window_inputs(points, n);
    std::vector<WindowSample> out;
    out.reserve(inputs.size());
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        out.push_back({inputs[j], truth[j + n - 1]});
    }
    return out;
}

std::vector<Vector> build_window_inputs(const std::vector<CartesianPoint>& points, std::size_t n) {
    if (n == 0) throw Error(ErrorKind::Domain, "window length must be at least 1");
    if (points.size() < n) {
        throw Error(ErrorKind::Domain, "need at least " + std::to_string(n) + " points for a window, got " +
                                           std::to_string(points.size()));
    }
    std::vector<Vector> out;
    out.reserve(points.size() - n + 1);
    for (std::size_t j = 0; j + n <= points.size(); ++j) {
        Vector v(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            v(2 * i) = points[j + i].x;
            v(2 * i + 1) = points[j + i].y;
        }
        out.push_back(std::move(v));
    }
    return out;
}

MLPParams init_params(const std::vector<std::size_t>& layer_sizes, Rng& rng) {
    if (layer_sizes.size() < 2) throw Error(ErrorKind::Domain, "network needs at least two layer sizes");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw Error(ErrorKind::Domain, "layer sizes must be positive");
    }
    MLPParams p;
    p.layer_sizes = layer_sizes;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(layer_sizes[l + 1]);
        const auto cols = static_cast<Eigen::Index>(layer_sizes[l]);
        Matrix w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) w(r, c) = rng.normal();
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Vector::Zero(rows));
    }
    return p;
}

void validate(const MLPParams& params) {
    const auto& sizes = params.layer_sizes;
    if (sizes.size() < 2 || params.weights.size() != sizes.size() - 1 || params.biases.size() != sizes.size() - 1) {
        throw Error(ErrorKind::Dimension, "network layer count does not match its layer sizes");
    }
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(sizes[l + 1]);
        const auto cols = static_cast<Eigen::Index>(sizes[l]);
        if (params.weights[l].rows() != rows || params.weights[l].cols() != cols ||
            params.biases[l].size() != rows) {
            throw Error(ErrorKind::Dimension, "layer " + std::to_string(l) + " has weights " +
                                                  shape_string(params.weights[l]) + ", expected " +
                                                  std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
}

ForwardCache forward(const MLPParams& params, const Matrix& inputs) {
    if (inputs.rows() != static_cast<Eigen::Index>(params.input_size())) {
        throw Error(ErrorKind::Dimension, "forward: input has " + std::to_string(inputs.rows()) +
                                              " rows, network expects " + std::to_string(params.input_size()));
    }
    const std::size_t layers = params.layer_count();
    ForwardCache cache;
    cache.preactivations.reserve(layers);
    cache.activations.reserve(layers + 1);
    cache.activations.push_back(inputs);
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = params.weights[l] * cache.activations.back();
        z.colwise() += params.biases[l];
        Matrix a = (l + 1 < layers) ? Matrix(z.cwiseMax(0.0)) : z;
        cache.preactivations.push_back(std::move(z));
        cache.activations.push_back(std::move(a));
    }
    return cache;
}

Gradients backward(const MLPParams& params, const ForwardCache& cache, const Matrix& targets) {
    const Matrix& out = cache.output();
    if (targets.rows() != out.rows() || targets.cols() != out.cols()) {
        throw Error(ErrorKind::Dimension,
                    "backward: targets " + shape_string(targets) + " do not match outputs " + shape_string(out));
    }
    const std::size_t layers = params.layer_count();
    Gradients g;
    g.weights.resize(layers);
    g.biases.resize(layers);

    Matrix delta = (2.0 / static_cast<double>(out.size())) * (out - targets);
    for (std::size_t l = layers; l-- > 0;) {
        if (l + 1 < layers) {
            delta = delta.cwiseProduct((cache.preactivations[l].array() > 0.0).cast<double>().matrix());
        }
        g.weights[l] = delta * cache.activations[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) delta = params.weights[l].transpose() * delta;
    }
    return g;
}

double batch_cost(const Matrix& outputs, const Matrix& targets) {
    return (outputs - targets).squaredNorm() / static_cast<double>(outputs.size());
}

Matrix stack_inputs(const std::vector<WindowSample>& data) {
    if (data.empty()) throw Error(ErrorKind::Domain, "no samples to stack");
    Matrix x(data.front().inputs.size(), static_cast<Eigen::Index>(data.size()));
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (data[j].inputs.size() != x.rows()) {
            throw Error(ErrorKind::Dimension, "window " + std::to_string(j) + " has inconsistent input length");
        }
        x.col(static_cast<Eigen::Index>(j)) = data[j].inputs;
    }
    return x;
}

Matrix stack_targets(const std::vector<WindowSample>& data) {
    Matrix y(2, static_cast<Eigen::Index>(data.size()));
    for (std::size_t j = 0; j < data.size(); ++j) {
        y(0, static_cast<Eigen::Index>(j)) = data[j].target.x;
        y(1, static_cast<Eigen::Index>(j)) = data[j].target.y;
    }
    return y;
}

namespace {

void check_train_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
        throw Error(ErrorKind::Config, "train: learning rate must be a finite non-negative number");
    }
    if (cfg.iterations < 1) throw Error(ErrorKind::Config, "train: iterations must be at least 1");
    if (cfg.trace_every < 1) throw Error(ErrorKind::Config, "train: trace_every must be at least 1");
}

// Runs descent from global iteration `first` up to `last`, logging on the
// global trace grid so a resumed run produces the same trace as a single one.
void descend(TrainResult& result, const Matrix& x, const Matrix& y, const TrainConfig& cfg, std::size_t first,
             std::size_t last) {
    MLPParams& p = result.params;
    for (std::size_t it = first;; ++it) {
        const ForwardCache cache = forward(p, x);
        const double cost = batch_cost(cache.output(), y);
        if (!std::isfinite(cost)) {
            std::ostringstream os;
            os << "training diverged at iteration " << it << " (learning rate " << cfg.learning_rate << ", seed "
               << cfg.seed << ")";
            throw Error(ErrorKind::Divergence, os.str());
        }
        if (it % cfg.trace_every == 0 && (result.trace.empty() || result.trace.back().iteration != it)) {
            result.trace.push_back({it, cost});
        }
        if (it == last) {
            result.final_cost = cost;
            return;
        }
        const Gradients g = backward(p, cache, y);
        for (std::size_t l = 0; l < p.layer_count(); ++l) {
            p.weights[l] -= cfg.learning_rate * g.weights[l];
            p.biases[l] -= cfg.learning_rate * g.biases[l];
        }
    }
}

TrainResult start_training(const MLPParams& params, const std::vector<WindowSample>& data, const TrainConfig& cfg) {
    if (data.empty()) throw Error(ErrorKind::Domain, "train: no training samples");
    check_train_config(cfg);
    validate(params);
    if (params.output_size() != 2) throw Error(ErrorKind::Dimension, "train: network must output a 2-D point");
    TrainResult result;
    result.params = params;
    result.init_seed = cfg.seed;
    result.trace.reserve(cfg.iterations / cfg.trace_every + 1);
    return result;
}

}  // namespace

TrainResult train(const MLPParams& params, const std::vector<WindowSample>& data, const TrainConfig& cfg) {
    TrainResult result = start_training(params, data, cfg);
    descend(result, stack_inputs(data), stack_targets(data), cfg, 0, cfg.iterations);
    return result;
}

TrainResult train_best_of(const std::vector<std::size_t>& layer_sizes, const std::vector<WindowSample>& data,
                          const TrainConfig& cfg) {
    const std::size_t restarts = std::max<std::size_t>(1, cfg.restarts);
    const bool screened = restarts > 1 && cfg.screen_iterations > 0 && cfg.screen_iterations < cfg.iterations;
    const std::size_t budget = screened ? cfg.screen_iterations : cfg.iterations;
    if (data.empty()) throw Error(ErrorKind::Domain, "train: no training samples");
    const Matrix x = stack_inputs(data);
    const Matrix y = stack_targets(data);

    TrainResult best;
    bool found = false;
    std::string last_failure;
    for (std::size_t r = 0; r < restarts; ++r) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = restarts == 1 ? cfg.seed : derive_seed(cfg.seed, r);
        Rng rng(run_cfg.seed);
        try {
            TrainResult candidate = start_training(init_params(layer_sizes, rng), data, run_cfg);
            descend(candidate, x, y, run_cfg, 0, budget);
            if (!found || candidate.final_cost < best.final_cost) {
                best = std::move(candidate);
                found = true;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Divergence) throw;
            last_failure = e.what();
        }
    }
    if (!found) throw Error(ErrorKind::Divergence, "every restart diverged; last: " + last_failure);
    if (screened) {
        TrainConfig run_cfg = cfg;
        run_cfg.seed = best.init_seed;
        descend(best, x, y, run_cfg, budget, cfg.iterations);
    }
    return best;
}

std::vector<CartesianPoint> predict_track(const MLPParams& params, const std::vector<Vector>& inputs) {
    std::vector<CartesianPoint> out;
    if (inputs.empty()) return out;
    validate(params);
    if (params.output_size() != 2) throw Error(ErrorKind::Dimension, "predict_track: network must output 2 values");
    Matrix x(static_cast<Eigen::Index>(params.input_size()), static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        if (inputs[j].size() != x.rows()) {
            throw Error(ErrorKind::Dimension, "predict_track: window " + std::to_string(j) + " has " +
                                                  std::to_string(inputs[j].size()) + " inputs, network expects " +
                                                  std::to_string(x.rows()));
        }
        x.col(static_cast<Eigen::Index>(j)) = inputs[j];
    }
    const ForwardCache cache = forward(params, x);
    out.reserve(inputs.size());
    for (Eigen::Index j = 0; j < cache.output().cols(); ++j) {
        out.push_back({cache.output()(0, j), cache.output()(1, j)});
    }
    return out;
}

InputScaling fit_input_scaling(const std::vector<WindowSample>& data) {
    const Matrix x = stack_inputs(data);
    InputScaling s;
    s.mean = x.rowwise().mean();
    s.scale = ((x.colwise() - s.mean).array().square().rowwise().mean()).sqrt().matrix();
    for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
        if (!(s.scale(i) > 1e-12)) s.scale(i) = 1.0;
    }
    return s;
}

std::vector<WindowSample> apply_input_scaling(const std::vector<WindowSample>& data, const InputScaling& scaling) {
    std::vector<WindowSample> out = data;
    for (WindowSample& w : out) {
        w.inputs = ((w.inputs - scaling.mean).array() / scaling.scale.array()).matrix();
    }
    return out;
}

MLPParams fold_input_scaling(const MLPParams& params, const InputScaling& scaling) {
    MLPParams out = params;
    const Matrix scaled = params.weights.front() * scaling.scale.cwiseInverse().asDiagonal();
    out.biases.front() = params.biases.front() - scaled * scaling.mean;
    out.weights.front() = scaled;
    return out;
}

}  // namespace nntrack

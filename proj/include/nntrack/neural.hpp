#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nntrack/numerics.hpp"
#include "nntrack/sensor.hpp"

namespace nntrack {

/// One sliding-window row: n converted measurement points flattened oldest
/// first as [x1, y1, ..., xn, yn], and the ground-truth point at the newest
/// input's timestep.
struct WindowSample {
    Vector inputs;
    CartesianPoint target;
};

/// Fully connected ReLU network.  weights[l] is (sizes[l+1] x sizes[l]).
struct MLPParams {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
};

/// Network shape used in every tracking experiment: 3-point window in, one point out.
inline const std::vector<std::size_t> kTrackerLayers{6, 7, 5, 4, 2};

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t iterations = 20000;
    std::size_t trace_every = 100;
    std::uint64_t seed = 0;
    /// Independent initializations tried by train_best_of; the lowest final cost wins.
    std::size_t restarts = 1;
    /// When non-zero (and below iterations), every restart first runs this many
    /// iterations and only the lowest-cost candidate continues to the full count.
    std::size_t screen_iterations = 0;
};

struct CostPoint {
    std::size_t iteration = 0;
    double cost = 0.0;
};

using CostTrace = std::vector<CostPoint>;

/// Per-layer values kept for backpropagation.  Each column is one sample.
struct ForwardCache {
    std::vector<Matrix> preactivations;  // Z[l] = W[l] A[l] + b[l]
    std::vector<Matrix> activations;     // A[0] is the input, A[L] the output

    const Matrix& output() const { return activations.back(); }
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

struct TrainResult {
    MLPParams params;
    CostTrace trace;
    double final_cost = 0.0;
    std::uint64_t init_seed = 0;
};

std::vector<WindowSample> build_windows(const std::vector<CartesianPoint>& points,
                                        const std::vector<CartesianPoint>& truth, std::size_t n);

/// Window inputs only, for prediction when no ground truth is available.
std::vector<Vector> build_window_inputs(const std::vector<CartesianPoint>& points, std::size_t n);

/// Weights i.i.d. standard normal, biases zero.
MLPParams init_params(const std::vector<std::size_t>& layer_sizes, Rng& rng);

void validate(const MLPParams& params);

/// Hidden layers use max(0, z); the output layer is affine.
ForwardCache forward(const MLPParams& params, const Matrix& inputs);

/// Gradient of the mean squared error over every output component of the
/// batch in `cache`.  ReLU uses subgradient 0 at z == 0.
Gradients backward(const MLPParams& params, const ForwardCache& cache, const Matrix& targets);

double batch_cost(const Matrix& outputs, const Matrix& targets);

Matrix stack_inputs(const std::vector<WindowSample>& data);
Matrix stack_targets(const std::vector<WindowSample>& data);

/// Full-batch gradient descent.  Cost is logged at iteration 0 and every
/// trace_every updates; throws ErrorKind::Divergence on a non-finite cost.
TrainResult train(const MLPParams& params, const std::vector<WindowSample>& data, const TrainConfig& cfg);

/// Trains cfg.restarts networks from seeds derived from cfg.seed and keeps the best.
TrainResult train_best_of(const std::vector<std::size_t>& layer_sizes, const std::vector<WindowSample>& data,
                          const TrainConfig& cfg);

std::vector<CartesianPoint> predict_track(const MLPParams& params, const std::vector<Vector>& inputs);

/// Per-component standardization of window inputs.
struct InputScaling {
    Vector mean;
    Vector scale;
};

InputScaling fit_input_scaling(const std::vector<WindowSample>& data);
std::vector<WindowSample> apply_input_scaling(const std::vector<WindowSample>& data, const InputScaling& scaling);

/// Rewrites the first layer so the network accepts unscaled inputs directly.
MLPParams fold_input_scaling(const MLPParams& params, const InputScaling& scaling);

}  // namespace nntrack

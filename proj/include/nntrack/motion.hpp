#pragma once

#include <cstddef>
#include <vector>

#include "nntrack/numerics.hpp"

namespace nntrack {

/// Planar kinematic state, ordered [x, y, vx, vy] wherever it is vectorized.
struct KinematicState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;

    Vector to_vector() const;
    static KinematicState from_vector(const Vector& v);
    bool operator==(const KinematicState&) const = default;
};

/// Near-constant-velocity transition law x' = A x + B u + noise(Q).
struct MotionModel {
    double dt = 1.0;
    double q = 0.05;
    Matrix A;
    Matrix Q;
    Matrix B;
    Vector u;
};

constexpr double kDefaultDt = 1.0;
constexpr double kDefaultProcessNoise = 0.05;

Matrix cv_transition(double dt);

/// Continuous white-noise-acceleration covariance, q * [[dt^3/3, dt^2/2], [dt^2/2, dt]] per axis.
Matrix cv_process_noise(double dt, double q);

/// A and Q for the given dt and q; B is 4x2 acceleration input with u fixed at zero.
MotionModel make_cv_model(double dt = kDefaultDt, double q = kDefaultProcessNoise);

struct GroundTruthTrack {
    std::vector<KinematicState> states;
    double dt = 1.0;
};

GroundTruthTrack simulate_ground_truth(const KinematicState& init, const MotionModel& model,
                                       std::size_t steps, Rng& rng);

}  // namespace nntrack

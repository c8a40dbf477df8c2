#pragma once

#include <cstdint>
#include <vector>

#include "nntrack/motion.hpp"
#include "nntrack/numerics.hpp"
#include "nntrack/sensor.hpp"

namespace nntrack {

struct StateEstimate {
    Vector mean = Vector::Zero(4);  // [x, y, vx, vy]
    Matrix cov = Matrix::Identity(4, 4);
    std::int64_t k = 0;

    KinematicState state() const { return KinematicState::from_vector(mean); }
};

/// Filter output.  innovations[i] is the residual used to correct estimates[i].
struct Track {
    std::vector<StateEstimate> estimates;
    std::vector<Vector> innovations;
};

/// Direct (x, y) observation with constant H = [I 0].  Used as the linear
/// counterpart of the bearing/range sensor.
struct PositionSensor {
    Matrix R = Matrix::Identity(2, 2);
};

struct Correction {
    StateEstimate posterior;
    Vector innovation;
    Matrix S;
    Matrix K;
};

StateEstimate predict(const StateEstimate& est, const MotionModel& model);

/// Kalman update for an already linearized measurement: S = H P H^T + R,
/// K = P H^T S^-1, mean += K * innovation, P -= K S K^T (then symmetrized).
Correction apply_update(const StateEstimate& prior, const Vector& innovation, const Matrix& H, const Matrix& R);

Correction correct_detailed(const StateEstimate& prior, const Measurement& z, const SensorModel& sensor);
StateEstimate correct(const StateEstimate& prior, const Measurement& z, const SensorModel& sensor);

Correction correct_detailed(const StateEstimate& prior, const CartesianPoint& z, const PositionSensor& sensor);

constexpr double kInitPositionVariance = 10.0;
constexpr double kInitVelocityVariance = 5.0;

/// Anchors the filter at the first converted measurement with zero velocity,
/// P0 = diag(10, 10, 5, 5), one step before that measurement.
StateEstimate initial_estimate(const Measurement& first, const SensorModel& sensor);

Track run_filter(const std::vector<Measurement>& measurements, const StateEstimate& init,
                 const MotionModel& model, const SensorModel& sensor);
Track run_filter(const std::vector<CartesianPoint>& measurements, const StateEstimate& init,
                 const MotionModel& model, const PositionSensor& sensor);

}  // namespace nntrack

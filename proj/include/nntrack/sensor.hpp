#pragma once

#include <cstddef>
#include <vector>

#include "nntrack/motion.hpp"
#include "nntrack/numerics.hpp"

namespace nntrack {

/// Bearing in (-pi, pi] measured with atan2(dy, dx); range in metres.
struct Measurement {
    double bearing = 0.0;
    double range = 0.0;
    std::size_t k = 0;
};

struct CartesianPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const CartesianPoint&) const = default;
};

constexpr double kDefaultBearingVariance = 0.00349066;  // rad^2
constexpr double kDefaultRangeVariance = 0.5;           // m^2

/// Fixed bearing/range sensor.  R is diag(var_bearing, var_range) in rad^2 and m^2.
struct SensorModel {
    CartesianPoint position{50.0, 0.0};
    Matrix R = Matrix(Eigen::Vector2d(kDefaultBearingVariance, kDefaultRangeVariance).asDiagonal());

    static SensorModel with_variances(CartesianPoint position, double var_bearing, double var_range);
};

/// Maps any finite angle into (-pi, pi].
double wrap_angle(double a);

Measurement measure(const KinematicState& state, const SensorModel& sensor, Rng& rng, std::size_t k = 0);

/// One measurement per ground-truth state, indexed by timestep.
std::vector<Measurement> measure_track(const GroundTruthTrack& track, const SensorModel& sensor, Rng& rng);

CartesianPoint polar_to_cartesian(const Measurement& z, const SensorModel& sensor);
Measurement cartesian_to_polar(const CartesianPoint& p, const SensorModel& sensor);

/// d[bearing, range] / d[x, y, vx, vy], a 2x4 matrix.
Matrix measurement_jacobian(const KinematicState& state, const SensorModel& sensor);

/// The noiseless measurement function as a vector map, for Jacobian oracles.
Vector bearing_range(const Vector& state, const SensorModel& sensor);

}  // namespace nntrack

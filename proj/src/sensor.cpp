#include "nntrack/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nntrack {

namespace {

constexpr double kMinRange = 1e-9;

}  // namespace

SensorModel SensorModel::with_variances(CartesianPoint position, double var_bearing, double var_range) {
    if (!(var_bearing >= 0.0) || !(var_range >= 0.0)) {
        throw Error(ErrorKind::Domain, "sensor variances must be non-negative");
    }
    SensorModel sensor;
    sensor.position = position;
    sensor.R = Matrix::Zero(2, 2);
    sensor.R(0, 0) = var_bearing;
    sensor.R(1, 1) = var_range;
    return sensor;
}

double wrap_angle(double a) {
    if (!std::isfinite(a)) throw Error(ErrorKind::Domain, "wrap_angle: angle is not finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(a, two_pi);  // [-pi, pi]
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

Measurement measure(const KinematicState& state, const SensorModel& sensor, Rng& rng, std::size_t k) {
    const double dx = state.x - sensor.position.x;
    const double dy = state.y - sensor.position.y;
    if (dx == 0.0 && dy == 0.0) {
        throw Error(ErrorKind::Geometry, "measure: target coincides with the sensor, bearing undefined");
    }
    const Vector noise = sample_mvn(rng, Vector::Zero(2), sensor.R);
    Measurement z;
    z.bearing = wrap_angle(std::atan2(dy, dx) + noise(0));
    z.range = std::max(0.0, std::hypot(dx, dy) + noise(1));
    z.k = k;
    return z;
}

std::vector<Measurement> measure_track(const GroundTruthTrack& track, const SensorModel& sensor, Rng& rng) {
    std::vector<Measurement> out;
    out.reserve(track.states.size());
    for (std::size_t k = 0; k < track.states.size(); ++k) {
        out.push_back(measure(track.states[k], sensor, rng, k));
    }
    return out;
}

CartesianPoint polar_to_cartesian(const Measurement& z, const SensorModel& sensor) {
    return {sensor.position.x + z.range * std::cos(z.bearing),
            sensor.position.y + z.range * std::sin(z.bearing)};
}

Measurement cartesian_to_polar(const CartesianPoint& p, const SensorModel& sensor) {
    const double dx = p.x - sensor.position.x;
    const double dy = p.y - sensor.position.y;
    if (dx == 0.0 && dy == 0.0) {
        throw Error(ErrorKind::Geometry, "cartesian_to_polar: point coincides with the sensor");
    }
    Measurement z;
    z.bearing = wrap_angle(std::atan2(dy, dx));
    z.range = std::hypot(dx, dy);
    return z;
}

Matrix measurement_jacobian(const KinematicState& state, const SensorModel& sensor) {
    const double dx = state.x - sensor.position.x;
    const double dy = state.y - sensor.position.y;
    const double r2 = dx * dx + dy * dy;
    const double r = std::sqrt(r2);
    if (!(r >= kMinRange)) {
        throw Error(ErrorKind::Geometry, "measurement_jacobian: target within 1e-9 m of the sensor");
    }
    Matrix h = Matrix::Zero(2, 4);
    h(0, 0) = -dy / r2;
    h(0, 1) = dx / r2;
    h(1, 0) = dx / r;
    h(1, 1) = dy / r;
    return h;
}

Vector bearing_range(const Vector& state, const SensorModel& sensor) {
    const double dx = state(0) - sensor.position.x;
    const double dy = state(1) - sensor.position.y;
    Vector z(2);
    z << std::atan2(dy, dx), std::hypot(dx, dy);
    return z;
}

}  // namespace nntrack

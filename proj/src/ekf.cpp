#include "nntrack/ekf.hpp"

namespace nntrack {

StateEstimate predict(const StateEstimate& est, const MotionModel& model) {
    StateEstimate out;
    out.mean = mat_mul(model.A, est.mean) + mat_mul(model.B, model.u);
    out.cov = symmetrized(mat_mul(mat_mul(model.A, est.cov), model.A.transpose()) + model.Q);
    out.k = est.k + 1;
    return out;
}

Correction apply_update(const StateEstimate& prior, const Vector& innovation, const Matrix& H, const Matrix& R) {
    const Matrix ph_t = mat_mul(prior.cov, H.transpose());
    const Matrix S = mat_mul(H, ph_t) + R;
    const Matrix K = mat_mul(ph_t, mat_inverse(S));

    Correction c;
    c.innovation = innovation;
    c.S = S;
    c.K = K;
    c.posterior.mean = prior.mean + mat_mul(K, innovation);
    c.posterior.cov = symmetrized(prior.cov - mat_mul(mat_mul(K, S), K.transpose()));
    c.posterior.k = prior.k;
    return c;
}

Correction correct_detailed(const StateEstimate& prior, const Measurement& z, const SensorModel& sensor) {
    const KinematicState s = prior.state();
    const Matrix H = measurement_jacobian(s, sensor);
    const Measurement predicted = cartesian_to_polar({s.x, s.y}, sensor);
    Vector innovation(2);
    innovation << wrap_angle(z.bearing - predicted.bearing), z.range - predicted.range;
    return apply_update(prior, innovation, H, sensor.R);
}

StateEstimate correct(const StateEstimate& prior, const Measurement& z, const SensorModel& sensor) {
    return correct_detailed(prior, z, sensor).posterior;
}

Correction correct_detailed(const StateEstimate& prior, const CartesianPoint& z, const PositionSensor& sensor) {
    Matrix H = Matrix::Zero(2, 4);
    H(0, 0) = 1.0;
    H(1, 1) = 1.0;
    Vector observed(2);
    observed << z.x, z.y;
    return apply_update(prior, observed - mat_mul(H, prior.mean), H, sensor.R);
}

StateEstimate initial_estimate(const Measurement& first, const SensorModel& sensor) {
    const CartesianPoint p = polar_to_cartesian(first, sensor);
    StateEstimate est;
    est.mean << p.x, p.y, 0.0, 0.0;
    est.cov = Matrix::Zero(4, 4);
    est.cov.diagonal() << kInitPositionVariance, kInitPositionVariance, kInitVelocityVariance,
        kInitVelocityVariance;
    est.k = static_cast<std::int64_t>(first.k) - 1;
    return est;
}

namespace {

template <typename Obs, typename Sensor>
Track run_generic(const std::vector<Obs>& measurements, const StateEstimate& init, const MotionModel& model,
                  const Sensor& sensor) {
    if (measurements.empty()) throw Error(ErrorKind::Domain, "run_filter: no measurements");
    Track track;
    track.estimates.reserve(measurements.size());
    track.innovations.reserve(measurements.size());
    StateEstimate est = init;
    for (const Obs& z : measurements) {
        Correction c = correct_detailed(predict(est, model), z, sensor);
        est = std::move(c.posterior);
        track.estimates.push_back(est);
        track.innovations.push_back(std::move(c.innovation));
    }
    return track;
}

}  // namespace

Track run_filter(const std::vector<Measurement>& measurements, const StateEstimate& init,
                 const MotionModel& model, const SensorModel& sensor) {
    for (std::size_t i = 1; i < measurements.size(); ++i) {
        if (measurements[i].k <= measurements[i - 1].k) {
            throw Error(ErrorKind::Domain, "run_filter: measurements are not time-ordered");
        }
    }
    Track track = run_generic(measurements, init, model, sensor);
    // Predict advances k by one per cycle; stamp the measurement's own index.
    for (std::size_t i = 0; i < measurements.size(); ++i) {
        track.estimates[i].k = static_cast<std::int64_t>(measurements[i].k);
    }
    return track;
}

Track run_filter(const std::vector<CartesianPoint>& measurements, const StateEstimate& init,
                 const MotionModel& model, const PositionSensor& sensor) {
    return run_generic(measurements, init, model, sensor);
}

}  // namespace nntrack

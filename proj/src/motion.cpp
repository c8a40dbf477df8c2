#include "nntrack/motion.hpp"

#include <cmath>

namespace nntrack {

Vector KinematicState::to_vector() const {
    Vector v(4);
    v << x, y, vx, vy;
    return v;
}

KinematicState KinematicState::from_vector(const Vector& v) {
    if (v.size() != 4) {
        throw Error(ErrorKind::Dimension, "kinematic state needs 4 entries, got " + std::to_string(v.size()));
    }
    return {v(0), v(1), v(2), v(3)};
}

Matrix cv_transition(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorKind::Domain, "cv_transition: dt must be positive and finite");
    }
    Matrix a = Matrix::Identity(4, 4);
    a(0, 2) = dt;
    a(1, 3) = dt;
    return a;
}

Matrix cv_process_noise(double dt, double q) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorKind::Domain, "cv_process_noise: dt must be positive and finite");
    }
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw Error(ErrorKind::Domain, "cv_process_noise: intensity must be non-negative");
    }
    const double pp = q * dt * dt * dt / 3.0;
    const double pv = q * dt * dt / 2.0;
    const double vv = q * dt;
    Matrix noise = Matrix::Zero(4, 4);
    for (int axis = 0; axis < 2; ++axis) {
        noise(axis, axis) = pp;
        noise(axis, axis + 2) = pv;
        noise(axis + 2, axis) = pv;
        noise(axis + 2, axis + 2) = vv;
    }
    return noise;
}

MotionModel make_cv_model(double dt, double q) {
    MotionModel model;
    model.dt = dt;
    model.q = q;
    model.A = cv_transition(dt);
    model.Q = cv_process_noise(dt, q);
    model.B = Matrix::Zero(4, 2);
    model.B(0, 0) = 0.5 * dt * dt;
    model.B(1, 1) = 0.5 * dt * dt;
    model.B(2, 0) = dt;
    model.B(3, 1) = dt;
    model.u = Vector::Zero(2);
    return model;
}

GroundTruthTrack simulate_ground_truth(const KinematicState& init, const MotionModel& model,
                                       std::size_t steps, Rng& rng) {
    if (steps < 1) throw Error(ErrorKind::Domain, "simulate_ground_truth: steps must be at least 1");

    GroundTruthTrack track;
    track.dt = model.dt;
    track.states.reserve(steps);
    track.states.push_back(init);

    const Vector zero = Vector::Zero(4);
    const Vector drive = mat_mul(model.B, model.u);
    Vector state = init.to_vector();
    for (std::size_t k = 1; k < steps; ++k) {
        state = mat_mul(model.A, state) + drive + sample_mvn(rng, zero, model.Q);
        track.states.push_back(KinematicState::from_vector(state));
    }
    return track;
}

}  // namespace nntrack

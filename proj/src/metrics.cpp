#include "nntrack/metrics.hpp"

#include <cmath>
#include <string>

#include "nntrack/numerics.hpp"

namespace nntrack {

namespace {

void check_lengths(const char* op, std::size_t a, std::size_t b) {
    if (a != b) {
        throw Error(ErrorKind::Dimension, std::string(op) + ": track lengths differ (" + std::to_string(a) +
                                              " vs " + std::to_string(b) + ")");
    }
    if (a == 0) throw Error(ErrorKind::Dimension, std::string(op) + ": tracks are empty");
}

}  // namespace

double mse(const std::vector<CartesianPoint>& predicted, const std::vector<CartesianPoint>& truth) {
    check_lengths("mse", predicted.size(), truth.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double dx = predicted[i].x - truth[i].x;
        const double dy = predicted[i].y - truth[i].y;
        sum += dx * dx + dy * dy;
    }
    return sum / static_cast<double>(2 * predicted.size());
}

double euclidean(const CartesianPoint& p, const CartesianPoint& q) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    return std::sqrt(dx * dx + dy * dy);
}

TrackComparison track_distance_sum(const std::vector<CartesianPoint>& predicted,
                                   const std::vector<CartesianPoint>& truth) {
    check_lengths("track_distance_sum", predicted.size(), truth.size());
    TrackComparison c;
    c.per_step.reserve(predicted.size());
    double squares = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = euclidean(predicted[i], truth[i]);
        c.per_step.push_back(d);
        c.distance_sum += d;
        squares += d * d;
    }
    const auto n = static_cast<double>(predicted.size());
    c.rms_per_step = std::sqrt(squares / n);
    c.mse = mse(predicted, truth);
    return c;
}

}  // namespace nntrack

#pragma once

#include <cstddef>
#include <vector>

#include "nntrack/sensor.hpp"

namespace nntrack {

/// Estimated track versus ground truth.  distance_sum is the sum of per-step
/// Euclidean distances; rms_per_step is sqrt(mean(per_step^2)).
struct TrackComparison {
    double mse = 0.0;
    double distance_sum = 0.0;
    double rms_per_step = 0.0;
    std::vector<double> per_step;

    std::size_t n_steps() const { return per_step.size(); }
};

/// Mean of squared differences over both coordinates of every point.
double mse(const std::vector<CartesianPoint>& predicted, const std::vector<CartesianPoint>& truth);

double euclidean(const CartesianPoint& p, const CartesianPoint& q);

TrackComparison track_distance_sum(const std::vector<CartesianPoint>& predicted,
                                   const std::vector<CartesianPoint>& truth);

}  // namespace nntrack

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "nntrack/csv.hpp"
#include "nntrack/ekf.hpp"
#include "nntrack/metrics.hpp"
#include "nntrack/motion.hpp"
#include "nntrack/neural.hpp"
#include "nntrack/sensor.hpp"

namespace nntrack {

/// A point track keyed by timestep, as read from any CSV with k,x,y columns.
struct IndexedPoints {
    std::vector<std::size_t> k;
    std::vector<CartesianPoint> points;
};

// k,x,y,vx,vy
std::string ground_truth_csv(const GroundTruthTrack& track);
// k,bearing_rad,range_m,x_cart,y_cart
std::string measurements_csv(const std::vector<Measurement>& measurements, const SensorModel& sensor);
std::vector<Measurement> parse_measurements(const CsvTable& table);

/// X(M).1,Y(M).1,...,X(M).n,Y(M).n,X(G),Y(G)
std::vector<std::string> window_header(std::size_t n);
std::string windows_csv(const std::vector<WindowSample>& windows);
std::vector<WindowSample> parse_windows(const CsvTable& table);

// k,x,y,vx,vy,p00,p11,p22,p33
std::string track_csv(const Track& track);
IndexedPoints parse_points(const CsvTable& table);

// iteration,cost
std::string cost_trace_csv(const CostTrace& trace);

/**
 * Plain-text network parameters:
 *
 *   line 1      number of layer sizes L
 *   line 2      the L layer sizes
 *   next lines  each weight matrix in layer order, one matrix row per line
 *   last L-1    each bias vector in layer order, one per line
 *
 * Values are written in shortest round-trip form, so save/load is exact.
 */
std::string params_text(const MLPParams& params);
MLPParams parse_params(const std::string& text);

/// {mse, distance_sum, rms_per_step, n_steps}
nlohmann::json metrics_json(const TrackComparison& c);

}  // namespace nntrack

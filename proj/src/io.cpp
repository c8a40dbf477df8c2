#include "nntrack/io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nntrack {

namespace {

std::string num(double v) { return format_double(v); }

std::size_t index_cell(const CsvTable& t, std::size_t row, std::size_t col) {
    const double v = t.number(row, col);
    if (!(v >= 0.0) || std::floor(v) != v) {
        throw Error(ErrorKind::Parse, t.source + ": row " + std::to_string(row + 1) + ", column " +
                                          std::to_string(col + 1) + ": expected a non-negative integer index");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string ground_truth_csv(const GroundTruthTrack& track) {
    CsvWriter w({"k", "x", "y", "vx", "vy"});
    for (std::size_t k = 0; k < track.states.size(); ++k) {
        const KinematicState& s = track.states[k];
        w.row({std::to_string(k), num(s.x), num(s.y), num(s.vx), num(s.vy)});
    }
    return w.str();
}

std::string measurements_csv(const std::vector<Measurement>& measurements, const SensorModel& sensor) {
    CsvWriter w({"k", "bearing_rad", "range_m", "x_cart", "y_cart"});
    for (const Measurement& z : measurements) {
        const CartesianPoint p = polar_to_cartesian(z, sensor);
        w.row({std::to_string(z.k), num(z.bearing), num(z.range), num(p.x), num(p.y)});
    }
    return w.str();
}

std::vector<Measurement> parse_measurements(const CsvTable& table) {
    const std::size_t ck = table.column("k");
    const std::size_t cb = table.column("bearing_rad");
    const std::size_t cr = table.column("range_m");
    std::vector<Measurement> out;
    out.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        Measurement z;
        z.k = index_cell(table, i, ck);
        z.bearing = table.number(i, cb);
        z.range = table.number(i, cr);
        if (!(z.bearing > -std::numbers::pi && z.bearing <= std::numbers::pi) || !(z.range >= 0.0)) {
            throw Error(ErrorKind::Parse, table.source + ": row " + std::to_string(i + 1) +
                                              ": bearing must lie in (-pi, pi] and range must be non-negative");
        }
        out.push_back(z);
    }
    return out;
}

std::vector<std::string> window_header(std::size_t n) {
    std::vector<std::string> h;
    for (std::size_t i = 1; i <= n; ++i) {
        h.push_back("X(M)." + std::to_string(i));
        h.push_back("Y(M)." + std::to_string(i));
    }
    h.push_back("X(G)");
    h.push_back("Y(G)");
    return h;
}

std::string windows_csv(const std::vector<WindowSample>& windows) {
    const std::size_t n = windows.empty() ? 3 : static_cast<std::size_t>(windows.front().inputs.size()) / 2;
    CsvWriter w(window_header(n));
    for (const WindowSample& s : windows) {
        std::vector<std::string> cells;
        for (Eigen::Index i = 0; i < s.inputs.size(); ++i) cells.push_back(num(s.inputs(i)));
        cells.push_back(num(s.target.x));
        cells.push_back(num(s.target.y));
        w.row(cells);
    }
    return w.str();
}

std::vector<WindowSample> parse_windows(const CsvTable& table) {
    const std::size_t cols = table.header.size();
    if (cols < 4 || cols % 2 != 0) {
        throw Error(ErrorKind::Parse, table.source + ": window table needs an even number (>= 4) of columns");
    }
    const std::size_t n = (cols - 2) / 2;
    const std::vector<std::string> expected = window_header(n);
    for (std::size_t c = 0; c < cols; ++c) {
        if (table.header[c] != expected[c]) {
            throw Error(ErrorKind::Parse, table.source + ": header column " + std::to_string(c + 1) + " is '" +
                                              table.header[c] + "', expected '" + expected[c] + "'");
        }
    }
    std::vector<WindowSample> out;
    out.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        WindowSample s;
        s.inputs.resize(static_cast<Eigen::Index>(2 * n));
        for (std::size_t c = 0; c < 2 * n; ++c) s.inputs(static_cast<Eigen::Index>(c)) = table.number(r, c);
        s.target = {table.number(r, 2 * n), table.number(r, 2 * n + 1)};
        out.push_back(std::move(s));
    }
    return out;
}

std::string track_csv(const Track& track) {
    CsvWriter w({"k", "x", "y", "vx", "vy", "p00", "p11", "p22", "p33"});
    for (const StateEstimate& e : track.estimates) {
        w.row({std::to_string(e.k), num(e.mean(0)), num(e.mean(1)), num(e.mean(2)), num(e.mean(3)),
               num(e.cov(0, 0)), num(e.cov(1, 1)), num(e.cov(2, 2)), num(e.cov(3, 3))});
    }
    return w.str();
}

IndexedPoints parse_points(const CsvTable& table) {
    const std::size_t ck = table.column("k");
    const std::size_t cx = table.column("x");
    const std::size_t cy = table.column("y");
    IndexedPoints out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out.k.push_back(index_cell(table, i, ck));
        out.points.push_back({table.number(i, cx), table.number(i, cy)});
    }
    return out;
}

std::string cost_trace_csv(const CostTrace& trace) {
    CsvWriter w({"iteration", "cost"});
    for (const CostPoint& p : trace) w.row({std::to_string(p.iteration), num(p.cost)});
    return w.str();
}

std::string params_text(const MLPParams& params) {
    validate(params);
    std::string out = std::to_string(params.layer_sizes.size()) + "\n";
    auto join = [](auto&& values) {
        std::string line;
        bool first = true;
        for (auto v : values) {
            if (!first) line += ' ';
            first = false;
            if constexpr (std::is_integral_v<decltype(v)>) {
                line += std::to_string(v);
            } else {
                line += format_double(v);
            }
        }
        return line + "\n";
    };
    out += join(params.layer_sizes);
    for (const Matrix& w : params.weights) {
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            std::vector<double> row(w.cols());
            for (Eigen::Index c = 0; c < w.cols(); ++c) row[c] = w(r, c);
            out += join(row);
        }
    }
    for (const Vector& b : params.biases) out += join(std::vector<double>(b.data(), b.data() + b.size()));
    return out;
}

MLPParams parse_params(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    std::size_t pos = 0;
    auto next = [&](const char* what) -> double {
        if (pos >= tokens.size()) throw Error(ErrorKind::Parse, std::string("parameter file truncated while reading ") + what);
        CsvTable cell{"parameter file", {what}, {{tokens[pos]}}};
        ++pos;
        return cell.number(0, 0);
    };

    const double count = next("layer count");
    if (!(count >= 2) || std::floor(count) != count) throw Error(ErrorKind::Parse, "parameter file: bad layer count");
    MLPParams p;
    for (std::size_t i = 0; i < static_cast<std::size_t>(count); ++i) {
        const double s = next("layer size");
        if (!(s >= 1) || std::floor(s) != s) throw Error(ErrorKind::Parse, "parameter file: bad layer size");
        p.layer_sizes.push_back(static_cast<std::size_t>(s));
    }
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        Matrix w(static_cast<Eigen::Index>(p.layer_sizes[l + 1]), static_cast<Eigen::Index>(p.layer_sizes[l]));
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = next("weight");
        }
        p.weights.push_back(std::move(w));
    }
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        Vector b(static_cast<Eigen::Index>(p.layer_sizes[l + 1]));
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = next("bias");
        p.biases.push_back(std::move(b));
    }
    if (pos != tokens.size()) throw Error(ErrorKind::Parse, "parameter file has trailing values");
    return p;
}

nlohmann::json metrics_json(const TrackComparison& c) {
    return {{"mse", c.mse}, {"distance_sum", c.distance_sum}, {"rms_per_step", c.rms_per_step},
            {"n_steps", c.n_steps()}};
}

}  // namespace nntrack

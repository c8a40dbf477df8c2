#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nntrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ErrorKind {
    Dimension,
    Singular,
    Domain,
    Geometry,
    Divergence,
    Parse,
    Io,
    Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/**
 * Deterministic pseudo-random source.
 *
 * The bit generator is SplitMix64 and normal deviates come from the
 * Box-Muller transform, both written out here so that a seed replays the
 * same stream on every platform and standard library.  Child streams are
 * derived with split(), which consumes one word of the parent stream.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();

    /// Independent generator seeded from this stream.
    Rng split();

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Mixes a base seed with a stream index into a new seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

std::string shape_string(const Matrix& m);

Matrix mat_mul(const Matrix& a, const Matrix& b);

/// Gauss-Jordan inverse with partial pivoting; closed form for 2x2.
/// Throws ErrorKind::Singular when |det| (2x2) or a pivot falls below 1e-12.
Matrix mat_inverse(const Matrix& a);

constexpr double kSingularTolerance = 1e-12;

/// Lower-triangular factor L with L*L^T == cov.  Positive semi-definite
/// input is accepted: zero pivots produce zero columns.
Matrix psd_factor(const Matrix& cov);

Vector sample_mvn(Rng& rng, const Vector& mean, const Matrix& cov);

using VectorFunction = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian, one column per input coordinate.
Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& x, double h = 1e-6);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Matrix& m);

Matrix symmetrized(const Matrix& m);

}  // namespace nntrack

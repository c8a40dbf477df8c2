#include "nntrack/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace nntrack {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Dimension: return "dimension";
        case ErrorKind::Singular: return "singular";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Geometry: return "geometry";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

namespace {

std::uint64_t splitmix_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix_finalize(state_);
}

double Rng::uniform() {
    // 53 random mantissa bits, shifted by half an ulp so 0 is never produced.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Rng Rng::split() { return Rng(splitmix_finalize(next_u64() ^ 0xD1B54A32D192ED03ULL)); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix_finalize(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

std::string shape_string(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorKind::Dimension,
                    "mat_mul: cannot multiply " + shape_string(a) + " by " + shape_string(b));
    }
    return a * b;
}

Matrix mat_inverse(const Matrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw Error(ErrorKind::Dimension, "mat_inverse: matrix must be square, got " + shape_string(a));
    }
    const Eigen::Index n = a.rows();
    if (n == 2) {
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        if (!(std::abs(det) >= kSingularTolerance)) {
            throw Error(ErrorKind::Singular, "mat_inverse: 2x2 matrix is singular");
        }
        Matrix inv(2, 2);
        inv << a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det;
        return inv;
    }

    Matrix work = a;
    Matrix inv = Matrix::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        }
        if (!(std::abs(work(pivot, col)) >= kSingularTolerance)) {
            throw Error(ErrorKind::Singular, "mat_inverse: pivot below tolerance in column " +
                                                 std::to_string(col) + " of " + shape_string(a));
        }
        if (pivot != col) {
            work.row(pivot).swap(work.row(col));
            inv.row(pivot).swap(inv.row(col));
        }
        const double p = work(col, col);
        work.row(col) /= p;
        inv.row(col) /= p;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = work(r, col);
            if (factor == 0.0) continue;
            work.row(r) -= factor * work.row(col);
            inv.row(r) -= factor * inv.row(col);
        }
    }
    return inv;
}

Matrix psd_factor(const Matrix& cov) {
    if (cov.rows() != cov.cols()) {
        throw Error(ErrorKind::Dimension, "psd_factor: covariance must be square, got " + shape_string(cov));
    }
    const Eigen::Index n = cov.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(cov(i, i) >= 0.0)) {
            throw Error(ErrorKind::Domain, "covariance has a negative or non-finite diagonal entry");
        }
    }

    const bool diagonal = cov.isDiagonal(0.0);
    Matrix factor = Matrix::Zero(n, n);
    if (diagonal) {
        for (Eigen::Index i = 0; i < n; ++i) factor(i, i) = std::sqrt(cov(i, i));
        return factor;
    }

    const double scale = std::max(1.0, cov.diagonal().maxCoeff());
    const double tol = 1e-12 * scale;
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = cov(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= factor(j, k) * factor(j, k);
        if (d < -tol) {
            throw Error(ErrorKind::Domain, "covariance is not positive semi-definite");
        }
        if (d <= tol) {
            // Zero pivot: the remaining entries of this column must vanish too.
            for (Eigen::Index i = j + 1; i < n; ++i) {
                double s = cov(i, j);
                for (Eigen::Index k = 0; k < j; ++k) s -= factor(i, k) * factor(j, k);
                if (std::abs(s) > std::sqrt(tol)) {
                    throw Error(ErrorKind::Domain, "covariance is not positive semi-definite");
                }
            }
            continue;
        }
        const double ljj = std::sqrt(d);
        factor(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = cov(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= factor(i, k) * factor(j, k);
            factor(i, j) = s / ljj;
        }
    }
    return factor;
}

Vector sample_mvn(Rng& rng, const Vector& mean, const Matrix& cov) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
        throw Error(ErrorKind::Dimension, "sample_mvn: covariance " + shape_string(cov) +
                                              " does not match mean of size " + std::to_string(mean.size()));
    }
    const Matrix factor = psd_factor(cov);
    Vector xi(mean.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
    return mean + factor * xi;
}

Matrix finite_diff_jacobian(const VectorFunction& f, const Vector& x, double h) {
    if (!(h > 0.0)) throw Error(ErrorKind::Domain, "finite_diff_jacobian: step must be positive");
    const Vector f0 = f(x);
    Matrix jac(f0.size(), x.size());
    Vector probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        const Vector up = f(probe);
        probe(i) = x(i) - h;
        const Vector down = f(probe);
        probe(i) = x(i);
        jac.col(i) = (up - down) / (2.0 * h);
    }
    return jac;
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace nntrack

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hamschrod/errors.hpp"

namespace hamschrod {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Spatial discretization used for every derivative inside N and L.
enum class Scheme { spectral, central_fd };

inline std::string to_string(Scheme s) { return s == Scheme::spectral ? "spectral" : "central_fd"; }

/// Uniform 1D grid. Periodic grids omit the node at x_max (it aliases x_min).
class SpatialGrid {
public:
    SpatialGrid(double x_min, double x_max, int n, bool periodic)
        : x_min_(x_min), x_max_(x_max), n_(n), periodic_(periodic) {
        if (!(x_max > x_min)) {
            throw DomainError("grid requires x_max > x_min (got " + std::to_string(x_min) + ", " +
                              std::to_string(x_max) + ")");
        }
        if (n < 4) {
            throw DomainError("grid requires at least 4 nodes (got " + std::to_string(n) + ")");
        }
        h_ = periodic ? (x_max - x_min) / n : (x_max - x_min) / (n - 1);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    int n() const { return n_; }
    bool periodic() const { return periodic_; }
    double h() const { return h_; }
    double length() const { return x_max_ - x_min_; }
    double x(int i) const { return x_min_ + i * h_; }

    bool operator==(const SpatialGrid&) const = default;

private:
    double x_min_;
    double x_max_;
    int n_;
    bool periodic_;
    double h_ = 0.0;
};

inline SpatialGrid build_grid(double x_min, double x_max, int n, bool periodic) {
    return SpatialGrid(x_min, x_max, n, periodic);
}

class TimeGrid {
public:
    TimeGrid(double t_final, int n_steps) : t_final_(t_final), n_steps_(n_steps) {
        if (!(t_final > 0.0)) throw DomainError("time horizon must be positive");
        if (n_steps < 1) throw DomainError("time grid needs at least one step");
        dt_ = t_final / n_steps;
    }

    double t_final() const { return t_final_; }
    int n_steps() const { return n_steps_; }
    int n_nodes() const { return n_steps_ + 1; }
    double dt() const { return dt_; }
    // The last node is pinned to t_final so the horizon is hit exactly.
    double t(int k) const { return k == n_steps_ ? t_final_ : k * dt_; }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_final_;
    int n_steps_;
    double dt_ = 0.0;
};

struct FieldSnapshot {
    Vector values;
    double t = 0.0;

    int size() const { return static_cast<int>(values.size()); }
};

/// One snapshot per time node; the representation of psi_m, delta_m, f_m and friends.
struct FieldSeries {
    std::vector<FieldSnapshot> snapshots;

    static FieldSeries zeros(int n, const TimeGrid& time) {
        FieldSeries s;
        s.snapshots.reserve(time.n_nodes());
        for (int k = 0; k < time.n_nodes(); ++k) s.snapshots.push_back({Vector::Zero(n), time.t(k)});
        return s;
    }

    /// Same snapshot repeated on every time node.
    static FieldSeries constant(const Vector& v, const TimeGrid& time) {
        FieldSeries s;
        s.snapshots.reserve(time.n_nodes());
        for (int k = 0; k < time.n_nodes(); ++k) s.snapshots.push_back({v, time.t(k)});
        return s;
    }

    int size() const { return static_cast<int>(snapshots.size()); }
    bool empty() const { return snapshots.empty(); }
    FieldSnapshot& operator[](int k) { return snapshots[k]; }
    const FieldSnapshot& operator[](int k) const { return snapshots[k]; }

    /// True when the series matches the grids: n_steps + 1 snapshots, each of length n,
    /// timestamps equal to the time nodes.
    bool matches(const SpatialGrid& grid, const TimeGrid& time) const {
        if (size() != time.n_nodes()) return false;
        for (int k = 0; k < size(); ++k) {
            if (snapshots[k].size() != grid.n()) return false;
            if (std::abs(snapshots[k].t - time.t(k)) > 1e-9 * std::max(1.0, time.t_final())) return false;
        }
        return true;
    }

    FieldSeries& operator+=(const FieldSeries& o) { return axpy(Complex(1.0), o); }
    FieldSeries& operator-=(const FieldSeries& o) { return axpy(Complex(-1.0), o); }

    FieldSeries& operator*=(Complex a) {
        for (auto& s : snapshots) s.values *= a;
        return *this;
    }

    /// this += a * o, snapshot by snapshot.
    FieldSeries& axpy(Complex a, const FieldSeries& o) {
        if (o.size() != size()) throw DomainError("series length mismatch in axpy");
        for (int k = 0; k < size(); ++k) {
            if (snapshots[k].size() != o[k].size()) throw DomainError("snapshot length mismatch in axpy");
            snapshots[k].values += a * o[k].values;
        }
        return *this;
    }

    /// Largest nodal modulus over the whole space-time grid.
    double max_abs() const {
        double m = 0.0;
        for (const auto& s : snapshots)
            if (s.values.size() > 0) m = std::max(m, s.values.cwiseAbs().maxCoeff());
        return m;
    }
};

inline FieldSeries operator+(FieldSeries a, const FieldSeries& b) { return a += b; }
inline FieldSeries operator-(FieldSeries a, const FieldSeries& b) { return a -= b; }
inline FieldSeries operator*(Complex c, FieldSeries a) { return a *= c; }

/// Discrete space-time L2 norm sqrt(sum_k sum_i |v|^2 h dt).
inline double l2_norm(const FieldSeries& s, double h, double dt) {
    double acc = 0.0;
    for (const auto& snap : s.snapshots) acc += snap.values.squaredNorm();
    return std::sqrt(acc * h * dt);
}

inline double max_abs_diff(const FieldSeries& a, const FieldSeries& b) {
    if (a.size() != b.size()) throw DomainError("series length mismatch");
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k) {
        if (a[k].size() != b[k].size()) throw DomainError("snapshot length mismatch");
        if (a[k].size() > 0) m = std::max(m, (a[k].values - b[k].values).cwiseAbs().maxCoeff());
    }
    return m;
}

}  // namespace hamschrod

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "hamschrod/problem.hpp"

namespace hamschrod {

/// du/dt = A u + b(t), u(0) = a, with b sampled on every time node.
struct LinearSystem {
    Matrix A;
    std::vector<Vector> b;
    Vector a;
    TimeGrid time;

    int n() const { return static_cast<int>(a.size()); }

    void check() const {
        if (A.rows() != A.cols() || A.rows() != a.size()) throw DomainError("linear system: A and a disagree in size");
        if (static_cast<int>(b.size()) != time.n_nodes()) {
            throw DomainError("linear system: forcing has " + std::to_string(b.size()) + " samples, expected " +
                              std::to_string(time.n_nodes()));
        }
        for (const auto& bk : b)
            if (bk.size() != a.size()) throw DomainError("linear system: forcing sample has wrong length");
    }

    /// Forcing frozen at the midpoint of step k.
    Vector b_mid(int k) const { return 0.5 * (b[k] + b[k + 1]); }
};

/// Rows pinned by Dirichlet data: du_r/dt = rates[k][i] for rows[i] at time node k.
struct BoundaryRows {
    std::vector<int> rows;
    std::vector<Vector> rates;
};

/// Dense matrix of a homogeneous linear operator, one column per unit basis field,
/// evaluated with the operator's coefficients at time t.
inline Matrix assemble_matrix(const OperatorExpr& linear_op, const SpatialGrid& grid, Scheme scheme, double t = 0.0) {
    if (!linear_op.is_linear()) throw LinearityError("operator is not linear: " + linear_op.describe());
    const int n = grid.n();
    Matrix A(n, n);
    FieldSnapshot unit{Vector::Zero(n), t};
    for (int j = 0; j < n; ++j) {
        unit.values.setZero();
        unit.values[j] = 1.0;
        A.col(j) = eval_operator(linear_op, unit, grid, scheme).values;
    }
    return A;
}

/// Method-of-lines system for du/dt = L u + f. Dirichlet rows become du_r/dt = rate.
inline LinearSystem discretize(const OperatorExpr& linear_op, const FieldSeries& forcing, const FieldSnapshot& initial,
                               const SpatialGrid& grid, const TimeGrid& time, Scheme scheme,
                               const BoundaryRows* boundary = nullptr) {
    if (scheme == Scheme::spectral && !grid.periodic()) throw SchemeError("spectral scheme needs a periodic grid");
    if (initial.size() != grid.n()) throw DomainError("initial state does not match grid");
    if (!forcing.matches(grid, time)) throw DomainError("forcing does not match the space-time grid");

    LinearSystem sys{assemble_matrix(linear_op, grid, scheme), {}, initial.values, time};
    sys.b.reserve(forcing.size());
    for (const auto& s : forcing.snapshots) sys.b.push_back(s.values);
    if (boundary) {
        for (std::size_t i = 0; i < boundary->rows.size(); ++i) {
            const int r = boundary->rows[i];
            sys.A.row(r).setZero();
            for (int k = 0; k < time.n_nodes(); ++k) sys.b[k][r] = boundary->rates[k][i];
        }
    }
    return sys;
}

inline double spectral_radius(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::ComplexEigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw EigenFailure("eigenvalue computation did not converge");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct Rk4Options {
    bool check_stability = true;
    double stability_limit = 2.5;
    std::function<void(const std::string& kind, const std::string& message)> warn;
};

namespace detail {

inline void require_finite(const Vector& u, int step) {
    if (!u.allFinite()) throw NaNError("state became non-finite at step " + std::to_string(step));
}

inline FieldSeries to_series(const std::vector<Vector>& states, const TimeGrid& time) {
    FieldSeries s;
    s.snapshots.reserve(states.size());
    for (int k = 0; k < static_cast<int>(states.size()); ++k) s.snapshots.push_back({states[k], time.t(k)});
    return s;
}

}  // namespace detail

/// Classic fourth-order Runge-Kutta; the forcing at the half step is the average of the
/// two neighbouring samples.
inline FieldSeries integrate_rk4(const LinearSystem& sys, const Rk4Options& opts = {}) {
    sys.check();
    const double dt = sys.time.dt();
    if (opts.check_stability) {
        const double lambda_dt = spectral_radius(sys.A) * dt;
        if (lambda_dt > opts.stability_limit && opts.warn) {
            opts.warn("StabilityWarning", "|lambda_max| dt = " + std::to_string(lambda_dt) + " exceeds " +
                                              std::to_string(opts.stability_limit));
        }
    }
    std::vector<Vector> states;
    states.reserve(sys.time.n_nodes());
    Vector u = sys.a;
    states.push_back(u);
    for (int k = 0; k < sys.time.n_steps(); ++k) {
        const Vector bm = sys.b_mid(k);
        const Vector k1 = sys.A * u + sys.b[k];
        const Vector k2 = sys.A * (u + 0.5 * dt * k1) + bm;
        const Vector k3 = sys.A * (u + 0.5 * dt * k2) + bm;
        const Vector k4 = sys.A * (u + dt * k3) + sys.b[k + 1];
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        detail::require_finite(u, k + 1);
        states.push_back(u);
    }
    return detail::to_series(states, sys.time);
}

/// Exact per-step propagation with midpoint-frozen forcing:
///   u_{k+1} = exp(A dt) u_k + (int_0^dt exp(A s) ds) b_mid.
/// Both blocks come from one exponential of the augmented matrix [[A, I], [0, 0]] dt.
inline FieldSeries integrate_expm(const LinearSystem& sys) {
    sys.check();
    const int n = sys.n();
    const double dt = sys.time.dt();
    Matrix aug = Matrix::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = sys.A * dt;
    aug.topRightCorner(n, n) = Matrix::Identity(n, n) * dt;
    const Matrix E = aug.exp();
    const Matrix phi = E.topLeftCorner(n, n);
    const Matrix integral = E.topRightCorner(n, n);
    if (!phi.allFinite() || !integral.allFinite()) throw NaNError("matrix exponential is not finite");

    std::vector<Vector> states;
    states.reserve(sys.time.n_nodes());
    Vector u = sys.a;
    states.push_back(u);
    for (int k = 0; k < sys.time.n_steps(); ++k) {
        u = phi * u + integral * sys.b_mid(k);
        detail::require_finite(u, k + 1);
        states.push_back(u);
    }
    return detail::to_series(states, sys.time);
}

/// Method-of-lines RK4 on du/dt = N[u] + g, computed on a grid refined `refine` times in
/// space and time and restricted back to the problem grids.
inline FieldSeries solve_nonlinear_reference(const EvolutionProblem& problem, int refine) {
    if (refine < 1) throw ConfigError("refine must be >= 1");
    const EvolutionProblem fine = refine_problem(problem, refine);
    const auto& grid = fine.grid;
    const double dt = fine.time.dt();
    const auto boundary = fine.boundary_nodes();

    auto forcing_at = [&](int k, double frac) -> Vector {
        const double t = fine.time.t(k) + frac * dt;
        if (fine.forcing_fn) return sample(fine.forcing_fn, grid, t).values;
        if (frac == 0.0) return fine.forcing[k].values;
        if (frac == 1.0) return fine.forcing[k + 1].values;
        return (1.0 - frac) * fine.forcing[k].values + frac * fine.forcing[k + 1].values;
    };
    auto rhs = [&](const Vector& u, double t, const Vector& g) -> Vector {
        Vector du = eval_operator(fine.nonlinearity, FieldSnapshot{u, t}, grid, fine.scheme).values + g;
        for (int r : boundary) du[r] = fine.boundary.rate(t);
        return du;
    };

    std::vector<Vector> states;
    states.reserve(problem.time.n_nodes());
    Vector u = fine.initial.values;
    states.push_back(u);
    for (int k = 0; k < fine.time.n_steps(); ++k) {
        const double t = fine.time.t(k);
        const Vector g0 = forcing_at(k, 0.0);
        const Vector gm = forcing_at(k, 0.5);
        const Vector g1 = forcing_at(k, 1.0);
        const Vector k1 = rhs(u, t, g0);
        const Vector k2 = rhs(u + 0.5 * dt * k1, t + 0.5 * dt, gm);
        const Vector k3 = rhs(u + 0.5 * dt * k2, t + 0.5 * dt, gm);
        const Vector k4 = rhs(u + dt * k3, t + dt, g1);
        u += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        detail::require_finite(u, k + 1);
        if ((k + 1) % refine == 0) states.push_back(u);
    }

    FieldSeries out;
    out.snapshots.reserve(states.size());
    for (int k = 0; k < static_cast<int>(states.size()); ++k) {
        Vector coarse(problem.grid.n());
        for (int i = 0; i < problem.grid.n(); ++i) coarse[i] = states[k][i * refine];
        out.snapshots.push_back({coarse, problem.time.t(k)});
    }
    return out;
}

}  // namespace hamschrod

#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamschrod/classical.hpp"
#include "hamschrod/parallel.hpp"
#include "hamschrod/schrodinger.hpp"

namespace hamschrod {

enum class GuessPolicy { constant_in_time_from_ic, user_supplied };
enum class Backend { classical, schrodingerise };

inline std::string to_string(Backend b) { return b == Backend::classical ? "classical" : "schrodingerise"; }

/// Stop when resid_m >= factor * resid_{m - window}; resid_0 is the guess residual.
struct DivergenceGuard {
    bool enabled = true;
    double factor = 10.0;
    int window = 3;
};

struct HamConfig {
    double c0 = -1.0;
    int M = 10;
    int iterations = 0;
    std::optional<OperatorExpr> linear_op;  // unset: the linear part of N
    GuessPolicy guess_policy = GuessPolicy::constant_in_time_from_ic;
    std::shared_ptr<const FieldSeries> guess;
    std::shared_ptr<const FieldSeries> guess_dt;  // unset: 4th-order differences in time
    Backend backend = Backend::classical;
    std::optional<SchrodConfig> schrod;
    DivergenceGuard guard;
    bool keep_fields = true;  // store f_m and delta_m in the history
    std::function<void(const std::string& kind, const std::string& message)> warn;

    OperatorExpr resolved_linear_op(const OperatorExpr& nonlinearity) const {
        return linear_op ? *linear_op : nonlinearity.linear_part();
    }

    void validate() const {
        if (c0 == 0.0 || !std::isfinite(c0)) throw ConfigError("c0 must be a finite nonzero number");
        if (M < 1) throw ConfigError("M must be >= 1");
        if (iterations < 0) throw ConfigError("iterations must be >= 0");
        if (linear_op && !linear_op->is_linear()) throw LinearityError("linear_op is not linear: " + linear_op->describe());
        if (guess_policy == GuessPolicy::user_supplied && !guess) throw ConfigError("user_supplied guess policy needs a guess");
        if (backend == Backend::schrodingerise && schrod) schrod->validate();
        if (guard.enabled && (guard.window < 1 || !(guard.factor > 1.0))) {
            throw ConfigError("divergence guard needs window >= 1 and factor > 1");
        }
    }
};

/// Taylor coefficients psi_m of the homotopy in q, with their time derivatives.
struct HomotopySeries {
    std::vector<FieldSeries> psi;
    std::vector<FieldSeries> dpsi_dt;

    int order() const { return static_cast<int>(psi.size()) - 1; }

    void append(FieldSeries p, FieldSeries dp) {
        psi.push_back(std::move(p));
        dpsi_dt.push_back(std::move(dp));
    }
};

struct DeformationSolveRecord {
    int m = 0;
    int iteration = 0;
    std::shared_ptr<const FieldSeries> f_m;
    std::shared_ptr<const FieldSeries> delta_m;
    double f_m_norm = 0.0;
    double residual_norm_after = 0.0;
};

inline int chi(int m) {
    if (m < 0) throw OrderError("chi is defined for m >= 0");
    return m <= 1 ? 0 : 1;
}

namespace detail {

inline void require_order(const HomotopySeries& s, int k) {
    if (k < 0) throw OrderError("negative order " + std::to_string(k));
    if (k > s.order()) {
        throw OrderError("order " + std::to_string(k) + " requested but the series holds 0.." + std::to_string(s.order()));
    }
}

/// Homotopy derivative at one time node, reusing spatial derivatives of psi_0..psi_k.
inline Vector homotopy_derivative_at(const OperatorExpr& expr, const HomotopySeries& s, int k, int t_index,
                                     const SpatialGrid& grid, Scheme scheme) {
    const int n = grid.n();
    const double t = s.psi[0][t_index].t;
    std::vector<DerivativeCache> derivs;
    derivs.reserve(k + 1);
    for (int j = 0; j <= k; ++j) derivs.emplace_back(s.psi[j][t_index], grid, scheme);

    Vector total = Vector::Zero(n);
    for (const auto& term : expr.terms) {
        // acc[j] is the q^j coefficient of the product of the factors seen so far.
        std::vector<std::optional<Vector>> acc(k + 1);
        acc[0] = Vector::Constant(n, Complex(1.0));
        for (const auto& f : term.factors) {
            std::vector<std::optional<Vector>> coef(k + 1);
            if (auto* d = std::get_if<DerivativeOfState>(&f)) {
                for (int j = 0; j <= k; ++j) coef[j] = derivs[j].get(d->order);
            } else {
                coef[0] = std::get<KnownFunction>(f).sample(grid, t);
            }
            std::vector<std::optional<Vector>> next(k + 1);
            for (int j = 0; j <= k; ++j) {
                for (int i = 0; i <= j; ++i) {
                    if (!acc[i] || !coef[j - i]) continue;
                    Vector prod = acc[i]->cwiseProduct(*coef[j - i]);
                    if (next[j]) *next[j] += prod;
                    else next[j] = std::move(prod);
                }
            }
            acc = std::move(next);
        }
        if (acc[k]) total += term.coefficient * *acc[k];
    }
    return total;
}

}  // namespace detail

/// (1/k!) d^k N[sum_m psi_m q^m] / dq^k at q = 0, at time node t_index.
inline FieldSnapshot homotopy_derivative(const OperatorExpr& expr, const HomotopySeries& series, int k, int t_index,
                                         const SpatialGrid& grid, Scheme scheme) {
    detail::require_order(series, k);
    if (t_index < 0 || t_index >= series.psi[0].size()) throw DomainError("time index out of range");
    return {detail::homotopy_derivative_at(expr, series, k, t_index, grid, scheme), series.psi[0][t_index].t};
}

/// Delta_0 = d/dt psi_0 - N[psi_0] - g;  Delta_k = d/dt psi_k - D_k N  (k >= 1, no g).
inline FieldSeries delta_term(int k, const HomotopySeries& series, const EvolutionProblem& problem) {
    detail::require_order(series, k);
    if (static_cast<int>(series.dpsi_dt.size()) <= k) throw OrderError("missing time derivative for order " + std::to_string(k));
    FieldSeries out = series.dpsi_dt[k];
    parallel_for(static_cast<std::size_t>(out.size()), [&](std::size_t idx) {
        const int t = static_cast<int>(idx);
        out[t].values -= detail::homotopy_derivative_at(problem.nonlinearity, series, k, t, problem.grid, problem.scheme);
        if (k == 0) out[t].values -= problem.forcing[t].values;
    });
    return out;
}

inline FieldSeries deformation_rhs(int m, const HomotopySeries& series, const EvolutionProblem& problem, double c0) {
    if (c0 == 0.0) throw ConfigError("c0 must be nonzero");
    if (m < 1) throw OrderError("deformation orders start at m = 1");
    FieldSeries f = delta_term(m - 1, series, problem);
    f *= Complex(c0);
    return f;
}

/// Fourth-order finite differences in time: centred inside, one-sided at the ends.
inline FieldSeries time_derivative(const FieldSeries& s, const TimeGrid& time) {
    const int nn = s.size();
    if (nn != time.n_nodes()) throw DomainError("series does not match the time grid");
    const double dt = time.dt();
    FieldSeries out = s;
    if (nn < 5) {
        for (int k = 0; k < nn; ++k) {
            const int lo = std::max(0, k - 1), hi = std::min(nn - 1, k + 1);
            out[k].values = (s[hi].values - s[lo].values) / ((hi - lo) * dt);
        }
        return out;
    }
    for (int k = 0; k < nn; ++k) {
        auto v = [&](int j) -> const Vector& { return s[j].values; };
        if (k >= 2 && k <= nn - 3) {
            out[k].values = (v(k - 2) - 8.0 * v(k - 1) + 8.0 * v(k + 1) - v(k + 2)) / (12.0 * dt);
        } else if (k < 2) {
            const int b = 0;
            const double w[2][5] = {{-25, 48, -36, 16, -3}, {-3, -10, 18, -6, 1}};
            out[k].values.setZero();
            for (int j = 0; j < 5; ++j) out[k].values += w[k][j] * v(b + j);
            out[k].values /= 12.0 * dt;
        } else {
            const int b = nn - 5;
            const double w[2][5] = {{-1, 6, -18, 10, 3}, {3, -16, 36, -48, 25}};
            out[k].values.setZero();
            for (int j = 0; j < 5; ++j) out[k].values += w[k - (nn - 2)][j] * v(b + j);
            out[k].values /= 12.0 * dt;
        }
    }
    return out;
}

struct ResidualResult {
    double norm = 0.0;
    FieldSeries field;
};

/// Defect d/dt psi - N[psi] - g of the original problem. Dirichlet nodes carry the
/// prescribed trace and are excluded. Without a supplied time derivative the candidate
/// is differenced in time.
inline ResidualResult residual(const FieldSeries& candidate, const EvolutionProblem& problem,
                               const FieldSeries* candidate_dt = nullptr) {
    if (!candidate.matches(problem.grid, problem.time)) throw DomainError("candidate does not match the problem grids");
    FieldSeries field = candidate_dt ? *candidate_dt : time_derivative(candidate, problem.time);
    if (!field.matches(problem.grid, problem.time)) throw DomainError("time derivative does not match the problem grids");
    const auto boundary = problem.boundary_nodes();
    parallel_for(static_cast<std::size_t>(field.size()), [&](std::size_t idx) {
        const int k = static_cast<int>(idx);
        field[k].values -= eval_operator(problem.nonlinearity, candidate[k], problem.grid, problem.scheme).values;
        field[k].values -= problem.forcing[k].values;
        for (int r : boundary) field[k].values[r] = 0.0;
    });
    const double norm = l2_norm(field, problem.grid.h(), problem.time.dt());
    return {norm, std::move(field)};
}

inline FieldSeries assemble_approximation(const HomotopySeries& series, int M) {
    if (M < 0) throw OrderError("M must be >= 0");
    detail::require_order(series, M);
    FieldSeries out = series.psi[0];
    for (int m = 1; m <= M; ++m) out += series.psi[m];
    return out;
}

inline FieldSeries assemble_time_derivative(const HomotopySeries& series, int M) {
    detail::require_order(series, M);
    FieldSeries out = series.dpsi_dt[0];
    for (int m = 1; m <= M; ++m) out += series.dpsi_dt[m];
    return out;
}

/// psi_0 and its time derivative from the guess policy.
inline std::pair<FieldSeries, FieldSeries> initial_guess(const EvolutionProblem& problem, const HamConfig& config) {
    if (config.guess_policy == GuessPolicy::constant_in_time_from_ic) {
        return {FieldSeries::constant(problem.initial.values, problem.time),
                FieldSeries::zeros(problem.grid.n(), problem.time)};
    }
    if (!config.guess || !config.guess->matches(problem.grid, problem.time)) {
        throw GuessError("user-supplied guess does not match the problem grids");
    }
    if (config.guess_dt) {
        if (!config.guess_dt->matches(problem.grid, problem.time)) {
            throw GuessError("user-supplied guess derivative does not match the problem grids");
        }
        return {*config.guess, *config.guess_dt};
    }
    return {*config.guess, time_derivative(*config.guess, problem.time)};
}

struct OrderSolution {
    FieldSeries psi;
    FieldSeries dpsi_dt;
    DeformationSolveRecord record;
    std::optional<SchrodDiagnostics> schrod;
};

/// Solves d/dt delta_m = L delta_m + f_m with the order-m initial and boundary data and
/// returns psi_m = delta_m + chi_m psi_{m-1}.
inline OrderSolution solve_order(int m, const HomotopySeries& series, const EvolutionProblem& problem,
                                 const HamConfig& config) {
    if (m < 1) throw OrderError("deformation orders start at m = 1");
    detail::require_order(series, m - 1);
    const int n = problem.grid.n();
    const int c = chi(m);
    const FieldSeries f = deformation_rhs(m, series, problem, config.c0);

    // psi_m(., 0) is alpha - psi_0(., 0) for m = 1 and zero otherwise.
    Vector init = m == 1 ? Vector(problem.initial.values - series.psi[0][0].values) : Vector(Vector::Zero(n));
    if (c) init -= series.psi[m - 1][0].values;
    if (m >= 2 && config.guess_policy == GuessPolicy::constant_in_time_from_ic) {
        const double scale = std::max(1.0, problem.initial.values.size() ? problem.initial.values.cwiseAbs().maxCoeff() : 0.0);
        if (init.size() && init.cwiseAbs().maxCoeff() > 1e-10 * scale) {
            throw GuessError("order " + std::to_string(m) + " has nonzero initial data under the constant guess policy");
        }
    }

    // On the boundary psi_1 = beta - psi_0 and psi_m = 0 beyond; delta_m follows.
    BoundaryRows rows;
    const auto nodes = problem.boundary_nodes();
    if (!nodes.empty()) {
        rows.rows = nodes;
        rows.rates.reserve(problem.time.n_nodes());
        for (int k = 0; k < problem.time.n_nodes(); ++k) {
            Vector r(static_cast<int>(nodes.size()));
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const int node = nodes[i];
                Complex rate = 0.0;
                if (m == 1) rate = problem.boundary.rate(problem.time.t(k)) - series.dpsi_dt[0][k].values[node];
                if (c) rate -= series.dpsi_dt[m - 1][k].values[node];
                r[static_cast<int>(i)] = rate;
            }
            rows.rates.push_back(std::move(r));
        }
    }

    const OperatorExpr L = config.resolved_linear_op(problem.nonlinearity);
    const LinearSystem sys = discretize(L, f, FieldSnapshot{init, 0.0}, problem.grid, problem.time, problem.scheme,
                                        nodes.empty() ? nullptr : &rows);

    OrderSolution out;
    FieldSeries delta;
    if (config.backend == Backend::classical) {
        Rk4Options opts;
        opts.warn = config.warn;
        delta = integrate_rk4(sys, opts);
    } else {
        SchrodDiagnostics diag;
        delta = schrodingerise_solve(sys, config.schrod.value_or(SchrodConfig{}), &diag);
        out.schrod = diag;
    }

    // d/dt delta_m = A delta_m + b, exactly as the discrete system defines it.
    FieldSeries ddelta = delta;
    for (int k = 0; k < ddelta.size(); ++k) ddelta[k].values = sys.A * delta[k].values + sys.b[k];

    out.psi = delta;
    out.dpsi_dt = ddelta;
    if (c) {
        out.psi += series.psi[m - 1];
        out.dpsi_dt += series.dpsi_dt[m - 1];
    }
    out.record.m = m;
    out.record.f_m_norm = l2_norm(f, problem.grid.h(), problem.time.dt());
    if (config.keep_fields) {
        out.record.f_m = std::make_shared<const FieldSeries>(f);
        out.record.delta_m = std::make_shared<const FieldSeries>(std::move(delta));
    }
    return out;
}

struct HamResult {
    FieldSeries solution;
    FieldSeries solution_dt;
    double residual_norm = 0.0;
    std::vector<DeformationSolveRecord> history;
    HomotopySeries series;  // coefficients of the final pass
    std::vector<SchrodDiagnostics> schrod;
};

/// M-th order homotopy approximation, optionally re-entered `iterations` times with the
/// previous approximation as the new guess.
inline HamResult ham_solve(const EvolutionProblem& problem, const HamConfig& config) {
    const ValidationReport report = validate_problem(problem);
    if (!report.ok()) throw ConfigError("problem is not runnable:\n" + report.summary());
    config.validate();
    const OperatorExpr L = config.resolved_linear_op(problem.nonlinearity);
    if (!L.is_linear()) throw LinearityError("auxiliary linear operator is not linear: " + L.describe());
    if (config.backend == Backend::schrodingerise && !config.schrod) {
        throw ConfigError("the schrodingerise backend needs a SchrodConfig");
    }

    auto [psi0, dpsi0] = initial_guess(problem, config);
    if (config.guess_policy == GuessPolicy::user_supplied && config.warn) {
        // Order 1 takes beta - psi_0 on the boundary, so any defect is absorbed there; still flag it.
        double defect = 0.0;
        for (int k = 0; k < problem.time.n_nodes(); ++k) {
            for (int node : problem.boundary_nodes()) {
                defect = std::max(defect, std::abs(psi0[k].values[node] - problem.boundary.value(problem.time.t(k))));
            }
        }
        if (defect > 1e-10) {
            config.warn("GuessBoundaryDefect", "user-supplied guess misses the boundary trace by " + std::to_string(defect));
        }
    }
    HamResult result;
    for (int pass = 0; pass <= config.iterations; ++pass) {
        HomotopySeries series;
        series.append(std::move(psi0), std::move(dpsi0));
        FieldSeries sum = series.psi[0];
        FieldSeries dsum = series.dpsi_dt[0];
        std::vector<double> resid{residual(sum, problem, &dsum).norm};

        for (int m = 1; m <= config.M; ++m) {
            OrderSolution sol = solve_order(m, series, problem, config);
            sum += sol.psi;
            dsum += sol.dpsi_dt;
            series.append(std::move(sol.psi), std::move(sol.dpsi_dt));
            const double r = residual(sum, problem, &dsum).norm;
            resid.push_back(r);
            sol.record.iteration = pass;
            sol.record.residual_norm_after = r;
            result.history.push_back(std::move(sol.record));
            if (sol.schrod) result.schrod.push_back(*sol.schrod);

            if (!std::isfinite(r)) {
                throw DivergenceError("residual became non-finite at order " + std::to_string(m));
            }
            const auto& g = config.guard;
            if (g.enabled && m >= g.window && r >= g.factor * resid[m - g.window]) {
                throw DivergenceError("residual grew from " + std::to_string(resid[m - g.window]) + " to " +
                                      std::to_string(r) + " over orders " + std::to_string(m - g.window) + ".." +
                                      std::to_string(m) + " (c0 = " + std::to_string(config.c0) + ")");
            }
        }
        result.residual_norm = resid.back();
        psi0 = sum;
        dpsi0 = dsum;
        result.series = std::move(series);
    }
    result.solution = std::move(psi0);
    result.solution_dt = std::move(dpsi0);
    return result;
}

}  // namespace hamschrod

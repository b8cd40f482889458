#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hamschrod/operator_expr.hpp"

namespace hamschrod {

/// Boundary data. Periodic grids carry no boundary; Dirichlet imposes the uniform trace
/// beta(t) on both end nodes.
struct BoundarySpec {
    enum class Kind { periodic, dirichlet };

    Kind kind = Kind::periodic;
    std::function<Complex(double)> value;  // beta(t)
    std::function<Complex(double)> rate;   // beta'(t)

    static BoundarySpec periodic() { return {}; }

    static BoundarySpec dirichlet(double constant) {
        return {Kind::dirichlet, [constant](double) { return Complex(constant); }, [](double) { return Complex(0.0); }};
    }

    static BoundarySpec dirichlet(std::function<Complex(double)> beta, std::function<Complex(double)> dbeta) {
        return {Kind::dirichlet, std::move(beta), std::move(dbeta)};
    }

    bool is_dirichlet() const { return kind == Kind::dirichlet; }
};

/// du/dt = N[u] + g on the grid, u(.,0) = alpha, with the given boundary data.
struct EvolutionProblem {
    std::string tag;
    SpatialGrid grid;
    TimeGrid time;
    OperatorExpr nonlinearity;
    Scheme scheme = Scheme::spectral;
    FieldSnapshot initial;
    FieldSeries forcing;
    BoundarySpec boundary;
    // Generators kept so the problem can be resampled on refined grids.
    SpaceTimeFunction initial_fn;
    SpaceTimeFunction forcing_fn;

    std::vector<int> boundary_nodes() const {
        if (!boundary.is_dirichlet()) return {};
        return {0, grid.n() - 1};
    }

    bool forcing_is_zero() const {
        for (const auto& s : forcing.snapshots)
            if (s.values.size() > 0 && s.values.cwiseAbs().maxCoeff() != 0.0) return false;
        return true;
    }
};

/// Samples the generators onto the grids. A null forcing generator means g = 0.
inline EvolutionProblem make_problem(std::string tag, SpatialGrid grid, TimeGrid time, OperatorExpr nonlinearity,
                                     SpaceTimeFunction initial_fn, SpaceTimeFunction forcing_fn = {},
                                     BoundarySpec boundary = BoundarySpec::periodic()) {
    EvolutionProblem p{std::move(tag), grid, time, std::move(nonlinearity), default_scheme(grid), {}, {},
                       std::move(boundary), std::move(initial_fn), std::move(forcing_fn)};
    p.initial = sample(p.initial_fn, p.grid, 0.0);
    p.forcing = p.forcing_fn ? sample(p.forcing_fn, p.grid, p.time) : FieldSeries::zeros(p.grid.n(), p.time);
    return p;
}

struct ValidationReport {
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    bool ok() const { return failures.empty(); }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& f : failures) os << "error: " << f << "\n";
        for (const auto& w : warnings) os << "warning: " << w << "\n";
        return os.str();
    }
};

inline ValidationReport validate_problem(const EvolutionProblem& p) {
    ValidationReport r;
    const int n = p.grid.n();

    if (p.initial.size() != n) {
        r.failures.push_back("shape: initial condition has " + std::to_string(p.initial.size()) + " values, grid has " +
                             std::to_string(n));
    }
    if (p.forcing.size() != p.time.n_nodes()) {
        r.failures.push_back("shape: forcing has " + std::to_string(p.forcing.size()) + " snapshots, expected " +
                             std::to_string(p.time.n_nodes()));
    } else if (!p.forcing.matches(p.grid, p.time)) {
        r.failures.push_back("shape: forcing snapshots do not match the space-time grid");
    }
    if (p.nonlinearity.has_derivative_out_of_range()) {
        r.failures.push_back("operator: derivative order outside [0, " + std::to_string(kMaxDerivativeOrder) + "]");
    }
    for (const auto& t : p.nonlinearity.terms) {
        for (const auto& f : t.factors) {
            const auto* k = std::get_if<KnownFunction>(&f);
            if (k && !k->fn && (!k->series || !k->series->matches(p.grid, p.time))) {
                r.failures.push_back("shape: known function '" + k->label + "' is not sampled on the problem grids");
            }
        }
    }
    if (p.scheme == Scheme::spectral && !p.grid.periodic()) {
        r.failures.push_back("scheme: spectral differentiation needs a periodic grid");
    }
    if (p.grid.periodic() && p.boundary.is_dirichlet()) {
        r.failures.push_back("boundary: Dirichlet data given on a periodic grid");
    }
    if (!p.grid.periodic() && !p.boundary.is_dirichlet()) {
        r.failures.push_back("boundary: bounded grid needs Dirichlet data");
    }
    if (p.boundary.is_dirichlet()) {
        if (!p.boundary.value || !p.boundary.rate) {
            r.failures.push_back("boundary: Dirichlet trace or its rate is missing");
        } else if (p.initial.size() == n) {
            const Complex beta0 = p.boundary.value(0.0);
            for (int node : p.boundary_nodes()) {
                if (std::abs(p.initial.values[node] - beta0) > 1e-10 * std::max(1.0, std::abs(beta0))) {
                    r.failures.push_back("compatibility: beta(0) differs from alpha at boundary node " +
                                         std::to_string(node));
                }
            }
        }
    }
    return r;
}

/// Same problem on a grid refined by `factor` in space and time. Needs generators for
/// the initial data (periodic grids fall back to spectral interpolation) and for any
/// nonzero forcing.
inline EvolutionProblem refine_problem(const EvolutionProblem& p, int factor) {
    if (factor < 1) throw ConfigError("refinement factor must be >= 1");
    if (factor == 1) return p;
    const int n = p.grid.n();
    const int fine_n = p.grid.periodic() ? n * factor : (n - 1) * factor + 1;
    EvolutionProblem out = p;
    out.grid = SpatialGrid(p.grid.x_min(), p.grid.x_max(), fine_n, p.grid.periodic());
    out.time = TimeGrid(p.time.t_final(), p.time.n_steps() * factor);

    if (p.initial_fn) {
        out.initial = sample(p.initial_fn, out.grid, 0.0);
    } else if (p.grid.periodic()) {
        // Zero-padded trigonometric interpolation; the Nyquist bin is split evenly.
        const Vector hat = fft::forward(p.initial.values);
        Vector fine_hat = Vector::Zero(fine_n);
        for (int j = 0; j < n; ++j) {
            const int k = fft::signed_index(j, n);
            if (n % 2 == 0 && j == n / 2) {
                fine_hat[fine_n - n / 2] += 0.5 * hat[j];
                fine_hat[n / 2] += 0.5 * hat[j];
                continue;
            }
            fine_hat[k >= 0 ? k : fine_n + k] = hat[j];
        }
        out.initial = {fft::inverse(fine_hat) * static_cast<double>(factor), 0.0};
    } else {
        throw ConfigError("cannot refine sampled initial data on a bounded grid without a generator");
    }

    if (p.forcing_fn) {
        out.forcing = sample(p.forcing_fn, out.grid, out.time);
    } else if (p.forcing_is_zero()) {
        out.forcing = FieldSeries::zeros(fine_n, out.time);
    } else {
        throw ConfigError("cannot refine sampled forcing without a generator");
    }
    if (!p.nonlinearity.resamplable()) {
        throw ConfigError("cannot refine an operator with sampled known functions");
    }
    return out;
}

}  // namespace hamschrod

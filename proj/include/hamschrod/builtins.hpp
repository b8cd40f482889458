#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hamschrod/problem.hpp"

namespace hamschrod {

/// Reference problem plus the auxiliary linear operator it ships with.
struct Builtin {
    EvolutionProblem problem;
    OperatorExpr linear_op;
};

struct BuiltinOverrides {
    std::optional<int> n;
    std::optional<int> n_steps;
    std::optional<double> t_final;
};

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{"burgers", "reaction_diffusion", "heat", "advection"};
    return names;
}

inline bool is_builtin(const std::string& name) {
    const auto& n = builtin_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

/// All builtins live on the periodic interval [0, 2 pi] with spectral derivatives.
///   burgers:            u_t = 0.1 u_xx - u u_x,  u(x, 0) = sin x,      n 128, T 1
///   reaction_diffusion: u_t = u_xx + u^2,        u(x, 0) = 0.1 sin x,  n 64,  T 0.5
///   heat:               u_t = 0.1 u_xx,          u(x, 0) = sin x,      n 32,  T 0.5
///   advection:          u_t = -u_x,              u(x, 0) = sin x,      n 64,  T 1
/// with dt = 1e-3 throughout.
inline Builtin make_builtin(const std::string& name, const BuiltinOverrides& o = {}) {
    auto grid_for = [&](int n_default) {
        return SpatialGrid(0.0, 2.0 * std::numbers::pi, o.n.value_or(n_default), true);
    };
    auto time_for = [&](double t_default, int steps_default) {
        return TimeGrid(o.t_final.value_or(t_default), o.n_steps.value_or(steps_default));
    };

    if (name == "burgers") {
        const double nu = 0.1;
        const TimeGrid time = time_for(1.0, 1000);
        OperatorExpr N{{nu, {state(2)}}, {-1.0, {state(0), state(1)}}};
        // Diffusion plus the convection linearized about the mean of the heat-decayed
        // initial profile, kappa = (1 - exp(-nu T)) / (nu T).
        const double kappa = -std::expm1(-nu * time.t_final()) / (nu * time.t_final());
        OperatorExpr L{{nu, {state(2)}},
                       {-kappa, {known(ClosedForm::sin()), state(1)}},
                       {-kappa, {known(ClosedForm::cos()), state(0)}}};
        auto p = make_problem(name, grid_for(128), time, N, ClosedForm::sin().as_function());
        return {std::move(p), std::move(L)};
    }
    if (name == "reaction_diffusion") {
        OperatorExpr N{{1.0, {state(2)}}, {1.0, {state(0), state(0)}}};
        OperatorExpr L{{1.0, {state(2)}}};
        auto p = make_problem(name, grid_for(64), time_for(0.5, 500), N, ClosedForm::sin(1.0, 0.1).as_function());
        return {std::move(p), std::move(L)};
    }
    if (name == "heat") {
        OperatorExpr N{{0.1, {state(2)}}};
        auto p = make_problem(name, grid_for(32), time_for(0.5, 500), N, ClosedForm::sin().as_function());
        return {std::move(p), N};
    }
    if (name == "advection") {
        OperatorExpr N{{-1.0, {state(1)}}};
        auto p = make_problem(name, grid_for(64), time_for(1.0, 1000), N, ClosedForm::sin().as_function());
        return {std::move(p), N};
    }
    throw ConfigError("unknown builtin problem '" + name + "'");
}

}  // namespace hamschrod

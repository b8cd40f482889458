#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hamschrod/types.hpp"

namespace hamschrod {

/// f(x, t), complex valued.
using SpaceTimeFunction = std::function<Complex(double x, double t)>;

/// Sum of separable modes  amplitude * shape(k x) * exp(rate t), shape in {1, sin, cos}.
/// This is the serializable form used by configs for initial data, forcing and
/// known-function factors.
struct ClosedForm {
    enum class Shape { constant, sin, cos };

    struct Mode {
        Shape shape = Shape::constant;
        double amplitude = 1.0;
        double k = 1.0;
        double rate = 0.0;
    };

    std::vector<Mode> modes;

    static ClosedForm constant(double a) { return {{{Shape::constant, a, 0.0, 0.0}}}; }
    static ClosedForm sin(double k = 1.0, double a = 1.0, double rate = 0.0) { return {{{Shape::sin, a, k, rate}}}; }
    static ClosedForm cos(double k = 1.0, double a = 1.0, double rate = 0.0) { return {{{Shape::cos, a, k, rate}}}; }

    ClosedForm& operator+=(const ClosedForm& o) {
        modes.insert(modes.end(), o.modes.begin(), o.modes.end());
        return *this;
    }

    bool empty() const { return modes.empty(); }

    double operator()(double x, double t = 0.0) const {
        double v = 0.0;
        for (const auto& m : modes) {
            double s = 1.0;
            if (m.shape == Shape::sin) s = std::sin(m.k * x);
            if (m.shape == Shape::cos) s = std::cos(m.k * x);
            v += m.amplitude * s * std::exp(m.rate * t);
        }
        return v;
    }

    SpaceTimeFunction as_function() const {
        return [cf = *this](double x, double t) { return Complex(cf(x, t), 0.0); };
    }

    std::string describe() const {
        if (modes.empty()) return "0";
        std::string out;
        for (const auto& m : modes) {
            if (!out.empty()) out += " + ";
            out += std::to_string(m.amplitude);
            if (m.shape == Shape::sin) out += "*sin(" + std::to_string(m.k) + "x)";
            if (m.shape == Shape::cos) out += "*cos(" + std::to_string(m.k) + "x)";
            if (m.rate != 0.0) out += "*exp(" + std::to_string(m.rate) + "t)";
        }
        return out;
    }
};

inline FieldSnapshot sample(const SpaceTimeFunction& f, const SpatialGrid& grid, double t) {
    FieldSnapshot s{Vector(grid.n()), t};
    for (int i = 0; i < grid.n(); ++i) s.values[i] = f(grid.x(i), t);
    return s;
}

inline FieldSeries sample(const SpaceTimeFunction& f, const SpatialGrid& grid, const TimeGrid& time) {
    FieldSeries out;
    out.snapshots.reserve(time.n_nodes());
    for (int k = 0; k < time.n_nodes(); ++k) out.snapshots.push_back(sample(f, grid, time.t(k)));
    return out;
}

}  // namespace hamschrod

#pragma once

#include <algorithm>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hamschrod/closed_form.hpp"
#include "hamschrod/differentiation.hpp"

namespace hamschrod {

/// d^order u / dx^order of the unknown.
struct DerivativeOfState {
    int order = 0;
};

/// A coefficient field that does not depend on the unknown: either a closed form or a
/// sampled series on the problem grids (interpolated linearly between time nodes).
struct KnownFunction {
    std::string label;
    std::optional<ClosedForm> closed_form;
    SpaceTimeFunction fn;
    std::shared_ptr<const FieldSeries> series;

    static KnownFunction from(ClosedForm cf) {
        KnownFunction k;
        k.label = cf.describe();
        k.fn = cf.as_function();
        k.closed_form = std::move(cf);
        return k;
    }

    static KnownFunction from(std::string label, SpaceTimeFunction fn) {
        KnownFunction k;
        k.label = std::move(label);
        k.fn = std::move(fn);
        return k;
    }

    static KnownFunction from(std::string label, std::shared_ptr<const FieldSeries> series) {
        KnownFunction k;
        k.label = std::move(label);
        k.series = std::move(series);
        return k;
    }

    bool resamplable() const { return static_cast<bool>(fn); }

    Vector sample(const SpatialGrid& grid, double t) const {
        if (fn) return hamschrod::sample(fn, grid, t).values;
        if (!series || series->empty()) throw DomainError("known function '" + label + "' has no data");
        const auto& snaps = series->snapshots;
        if (snaps.front().size() != grid.n()) {
            throw DomainError("sampled known function '" + label + "' does not match the grid");
        }
        if (t <= snaps.front().t) return snaps.front().values;
        if (t >= snaps.back().t) return snaps.back().values;
        auto it = std::upper_bound(snaps.begin(), snaps.end(), t,
                                   [](double v, const FieldSnapshot& s) { return v < s.t; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (t - lo.t) / (hi.t - lo.t);
        return (1.0 - w) * lo.values + w * hi.values;
    }
};

using Factor = std::variant<DerivativeOfState, KnownFunction>;

struct OperatorTerm {
    double coefficient = 1.0;
    std::vector<Factor> factors;

    int state_factor_count() const {
        return static_cast<int>(std::count_if(factors.begin(), factors.end(), [](const Factor& f) {
            return std::holds_alternative<DerivativeOfState>(f);
        }));
    }
};

inline Factor state(int order = 0) { return DerivativeOfState{order}; }
inline Factor known(ClosedForm cf) { return KnownFunction::from(std::move(cf)); }

/// Sum of coefficient * product-of-factors terms; the AST for both N and L.
struct OperatorExpr {
    std::vector<OperatorTerm> terms;

    OperatorExpr() = default;
    OperatorExpr(std::initializer_list<OperatorTerm> t) : terms(t) {}

    OperatorExpr& operator+=(const OperatorExpr& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }

    OperatorExpr scaled(double a) const {
        OperatorExpr out = *this;
        for (auto& t : out.terms) t.coefficient *= a;
        return out;
    }

    bool empty() const { return terms.empty(); }

    /// Homogeneous linear: every term carries exactly one state factor.
    bool is_linear() const {
        return std::all_of(terms.begin(), terms.end(), [](const OperatorTerm& t) { return t.state_factor_count() == 1; });
    }

    /// Terms with exactly one state factor; the default auxiliary linear operator.
    OperatorExpr linear_part() const {
        OperatorExpr out;
        for (const auto& t : terms)
            if (t.state_factor_count() == 1) out.terms.push_back(t);
        return out;
    }

    int max_order() const {
        int m = 0;
        for (const auto& t : terms)
            for (const auto& f : t.factors)
                if (auto* d = std::get_if<DerivativeOfState>(&f)) m = std::max(m, d->order);
        return m;
    }

    bool has_derivative_out_of_range() const {
        for (const auto& t : terms)
            for (const auto& f : t.factors)
                if (auto* d = std::get_if<DerivativeOfState>(&f))
                    if (d->order < 0 || d->order > kMaxDerivativeOrder) return true;
        return false;
    }

    bool resamplable() const {
        for (const auto& t : terms)
            for (const auto& f : t.factors)
                if (auto* k = std::get_if<KnownFunction>(&f))
                    if (!k->resamplable()) return false;
        return true;
    }

    std::string describe() const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& t : terms) {
            if (!out.empty()) out += " + ";
            out += std::to_string(t.coefficient);
            for (const auto& f : t.factors) {
                if (auto* d = std::get_if<DerivativeOfState>(&f)) {
                    out += d->order == 0 ? "*u" : "*D" + std::to_string(d->order) + "u";
                } else {
                    out += "*[" + std::get<KnownFunction>(f).label + "]";
                }
            }
        }
        return out;
    }
};

inline OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }

/// Derivatives 0..4 of one snapshot, computed on demand and reused within a call.
class DerivativeCache {
public:
    DerivativeCache(const FieldSnapshot& field, const SpatialGrid& grid, Scheme scheme)
        : field_(field), grid_(grid), scheme_(scheme) {}

    const Vector& get(int order) {
        detail::check_order(order);
        auto& slot = cache_[order];
        if (!slot) slot = differentiate(field_, order, grid_, scheme_).values;
        return *slot;
    }

private:
    const FieldSnapshot& field_;
    const SpatialGrid& grid_;
    Scheme scheme_;
    std::array<std::optional<Vector>, kMaxDerivativeOrder + 1> cache_;
};

/// Nodewise evaluation of expr[u] at the snapshot's time stamp.
inline FieldSnapshot eval_operator(const OperatorExpr& expr, const FieldSnapshot& field, const SpatialGrid& grid,
                                   Scheme scheme) {
    if (field.size() != grid.n()) throw DomainError("snapshot length does not match grid");
    FieldSnapshot out{Vector::Zero(grid.n()), field.t};
    DerivativeCache derivs(field, grid, scheme);
    for (const auto& term : expr.terms) {
        Vector prod = Vector::Constant(grid.n(), Complex(term.coefficient));
        for (const auto& f : term.factors) {
            if (auto* d = std::get_if<DerivativeOfState>(&f)) {
                prod.array() *= derivs.get(d->order).array();
            } else {
                prod.array() *= std::get<KnownFunction>(f).sample(grid, field.t).array();
            }
        }
        out.values += prod;
    }
    return out;
}

/// Spectral on periodic grids, central differences otherwise.
inline Scheme default_scheme(const SpatialGrid& grid) {
    return grid.periodic() ? Scheme::spectral : Scheme::central_fd;
}

inline FieldSnapshot eval_operator(const OperatorExpr& expr, const FieldSnapshot& field, const SpatialGrid& grid) {
    return eval_operator(expr, field, grid, default_scheme(grid));
}

}  // namespace hamschrod

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hamschrod/ham.hpp"

namespace hamschrod {

struct C0Sample {
    double c0 = 0.0;
    double residual_norm = 0.0;  // +inf marks a diverged run
};

struct C0Curve {
    std::vector<C0Sample> samples;
    int M = 0;
    std::string problem_tag;
};

/// Default sweep: `count` equispaced points on [lo, hi].
inline std::vector<double> c0_grid(double lo = -2.0, double hi = -0.05, int count = 40) {
    if (count < 1) throw ConfigError("sweep needs at least one point");
    if (count == 1) return {lo};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
    return out;
}

/// Residual of the M-th order approximation for each c0. The values are sorted and
/// deduplicated; diverged runs are kept with an infinite residual.
inline C0Curve residual_curve(const EvolutionProblem& problem, const HamConfig& base, std::vector<double> c0_values) {
    for (double c : c0_values)
        if (c == 0.0) throw ConfigError("c0 = 0 is not allowed in a sweep");
    std::sort(c0_values.begin(), c0_values.end());
    c0_values.erase(std::unique(c0_values.begin(), c0_values.end()), c0_values.end());

    C0Curve curve{std::vector<C0Sample>(c0_values.size()), base.M, problem.tag};
    parallel_for(c0_values.size(), [&](std::size_t i) {
        HamConfig cfg = base;
        cfg.c0 = c0_values[i];
        cfg.keep_fields = false;
        double r;
        try {
            r = ham_solve(problem, cfg).residual_norm;
        } catch (const DivergenceError&) {
            r = std::numeric_limits<double>::infinity();
        }
        curve.samples[i] = {c0_values[i], r};
    });
    return curve;
}

/// Argmin of the curve. Residuals within a relative 1e-12 count as ties; ties go to the
/// c0 closest to -1, then to the smaller |c0|.
inline double select_c0(const C0Curve& curve) {
    if (curve.samples.empty()) throw EmptyCurveError("c0 curve has no samples");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : curve.samples)
        if (std::isfinite(s.residual_norm)) best = std::min(best, s.residual_norm);
    if (!std::isfinite(best)) throw AllDivergedError("every c0 in the curve diverged");

    const double tol = 1e-12 * std::max(best, std::numeric_limits<double>::min());
    const C0Sample* pick = nullptr;
    for (const auto& s : curve.samples) {
        if (!(s.residual_norm <= best + tol)) continue;
        if (!pick) {
            pick = &s;
            continue;
        }
        const double da = std::abs(s.c0 + 1.0), db = std::abs(pick->c0 + 1.0);
        if (da < db - 1e-12 || (std::abs(da - db) <= 1e-12 && std::abs(s.c0) < std::abs(pick->c0))) pick = &s;
    }
    return pick->c0;
}

enum class Verdict { converging, stalled, diverging };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::converging: return "converging";
        case Verdict::diverging: return "diverging";
        default: return "stalled";
    }
}

struct ConvergenceReport {
    std::vector<double> residuals;
    std::vector<double> ratios;  // ratios[i] = residuals[i + 1] / residuals[i]
    Verdict verdict = Verdict::stalled;
};

inline Verdict classify_ratios(const std::vector<double>& ratios, int trailing = 3, double shrink = 0.9,
                               double grow = 1.1) {
    if (static_cast<int>(ratios.size()) < trailing) return Verdict::stalled;
    const auto tail = ratios.end() - trailing;
    if (std::all_of(tail, ratios.end(), [&](double r) { return r < shrink; })) return Verdict::converging;
    if (std::all_of(tail, ratios.end(), [&](double r) { return r > grow; })) return Verdict::diverging;
    return Verdict::stalled;
}

inline ConvergenceReport convergence_report(const std::vector<double>& residuals) {
    if (residuals.empty()) throw ConfigError("convergence report needs at least one residual");
    ConvergenceReport rep;
    rep.residuals = residuals;
    for (std::size_t i = 1; i < residuals.size(); ++i) {
        const double prev = residuals[i - 1];
        rep.ratios.push_back(prev > 0.0 ? residuals[i] / prev
                                        : (residuals[i] > 0.0 ? std::numeric_limits<double>::infinity() : 1.0));
    }
    rep.verdict = classify_ratios(rep.ratios);
    return rep;
}

/// Report over the residuals recorded by the last pass of a history.
inline ConvergenceReport convergence_report(const std::vector<DeformationSolveRecord>& history) {
    if (history.empty()) throw ConfigError("convergence report needs a non-empty history");
    const int last = history.back().iteration;
    std::vector<double> r;
    for (const auto& rec : history)
        if (rec.iteration == last) r.push_back(rec.residual_norm_after);
    return convergence_report(r);
}

}  // namespace hamschrod

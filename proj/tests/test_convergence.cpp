#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace hamschrod;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

C0Curve curve_of(std::vector<C0Sample> samples) { return {std::move(samples), 5, "test"}; }

}  // namespace

TEST(C0Grid, DefaultRange) {
    const auto g = c0_grid();
    ASSERT_EQ(g.size(), 40u);
    EXPECT_EQ(g.front(), -2.0);
    EXPECT_NEAR(g.back(), -0.05, 1e-15);
    EXPECT_THROW(c0_grid(-1.0, 1.0, 0), ConfigError);
}

TEST(SelectC0, Argmin) { EXPECT_EQ(select_c0(curve_of({{-1.0, 0.1}, {-0.5, 0.3}})), -1.0); }

TEST(SelectC0, TieGoesTowardMinusOneThenSmallerMagnitude) {
    EXPECT_EQ(select_c0(curve_of({{-1.2, 0.2}, {-0.8, 0.2}})), -0.8);
    EXPECT_EQ(select_c0(curve_of({{-1.5, 0.2}, {-0.9, 0.2}, {-0.2, 0.2}})), -0.9);
}

TEST(SelectC0, SkipsDivergedSamples) { EXPECT_EQ(select_c0(curve_of({{-1.0, kInf}, {-0.5, 0.3}})), -0.5); }

TEST(SelectC0, Errors) {
    EXPECT_THROW(select_c0(curve_of({})), EmptyCurveError);
    EXPECT_THROW(select_c0(curve_of({{-1.0, kInf}, {-0.5, kInf}})), AllDivergedError);
}

TEST(SelectC0, InvariantUnderPositiveScaling) {
    testgen::Gen gen(2718);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<C0Sample> s;
        const int n = gen.integer(1, 20);
        for (int i = 0; i < n; ++i) s.push_back({-0.1 * (i + 1), gen.uniform(1e-6, 1.0)});
        // Plant a tie now and then.
        if (n > 2 && trial % 3 == 0) s[n - 1].residual_norm = s[0].residual_norm;
        const double pick = select_c0(curve_of(s));
        for (double scale : {1e-8, 0.37, 1.0, 64.0, 1e9}) {
            auto scaled = s;
            for (auto& x : scaled) x.residual_norm *= scale;
            EXPECT_EQ(select_c0(curve_of(scaled)), pick) << scale;
        }
    }
}

TEST(ConvergenceReport, Geometric) {
    const auto r = convergence_report(std::vector<double>{1, 0.5, 0.25, 0.125});
    EXPECT_EQ(r.verdict, Verdict::converging);
    ASSERT_EQ(r.ratios.size(), 3u);
    for (double x : r.ratios) EXPECT_DOUBLE_EQ(x, 0.5);
}

TEST(ConvergenceReport, Flat) { EXPECT_EQ(convergence_report(std::vector<double>{1, 1, 1}).verdict, Verdict::stalled); }

TEST(ConvergenceReport, Growing) {
    EXPECT_EQ(convergence_report(std::vector<double>{1, 2, 4, 8}).verdict, Verdict::diverging);
}

TEST(ConvergenceReport, OnlyTrailingRatiosCount) {
    EXPECT_EQ(convergence_report(std::vector<double>{1, 4, 2, 1, 0.5}).verdict, Verdict::converging);
    EXPECT_EQ(convergence_report(std::vector<double>{1, 0.5, 0.25, 0.24}).verdict, Verdict::stalled);
}

TEST(ConvergenceReport, PureFunctionOfRatios) {
    testgen::Gen gen(31415);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> r{1.0};
        for (int i = 0; i < 6; ++i) r.push_back(r.back() * gen.uniform(0.3, 1.6));
        const auto a = convergence_report(r);
        auto scaled = r;
        for (auto& x : scaled) x *= 17.0;
        EXPECT_EQ(convergence_report(scaled).verdict, a.verdict);
        EXPECT_EQ(classify_ratios(a.ratios), a.verdict);
    }
}

TEST(ConvergenceReport, UsesLastIteration) {
    std::vector<DeformationSolveRecord> h;
    for (double r : {1.0, 2.0, 4.0, 8.0}) h.push_back({.m = int(h.size()) + 1, .iteration = 0, .residual_norm_after = r});
    for (double r : {1.0, 0.1, 0.01, 0.001}) h.push_back({.m = int(h.size()) - 3, .iteration = 1, .residual_norm_after = r});
    const auto rep = convergence_report(h);
    EXPECT_EQ(rep.residuals.size(), 4u);
    EXPECT_EQ(rep.verdict, Verdict::converging);
    EXPECT_THROW(convergence_report(std::vector<DeformationSolveRecord>{}), ConfigError);
}

TEST(ResidualCurve, SingletonMatchesSingleRun) {
    const auto b = make_builtin("burgers", {.n = 32, .n_steps = 100});
    HamConfig c;
    c.M = 3;
    c.linear_op = b.linear_op;
    c.c0 = -0.7;
    const auto curve = residual_curve(b.problem, c, {-0.7});
    ASSERT_EQ(curve.samples.size(), 1u);
    EXPECT_EQ(curve.samples[0].residual_norm, ham_solve(b.problem, c).residual_norm);
    EXPECT_EQ(curve.M, 3);
    EXPECT_EQ(curve.problem_tag, "burgers");
}

TEST(ResidualCurve, SortsDeduplicatesAndMarksDivergence) {
    const auto b = make_builtin("heat", {.n = 16, .n_steps = 50});
    HamConfig c;
    c.M = 4;
    c.linear_op = b.linear_op;
    const auto curve = residual_curve(b.problem, c, {-0.5, -50.0, -1.0, -0.5});
    ASSERT_EQ(curve.samples.size(), 3u);
    EXPECT_EQ(curve.samples[0].c0, -50.0);
    EXPECT_TRUE(std::isinf(curve.samples[0].residual_norm));
    EXPECT_EQ(select_c0(curve), -1.0);
    EXPECT_THROW(residual_curve(b.problem, c, {0.0}), ConfigError);
}

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support/generators.hpp"

using namespace hamschrod;
using testgen::max_abs;
using testgen::periodic_grid;

namespace {

LinearSystem constant_system(const Matrix& A, const Vector& a, const Vector& b, TimeGrid time) {
    return {A, std::vector<Vector>(time.n_nodes(), b), a, time};
}

// Random matrix with spectrum pushed into the left half plane.
Matrix well_conditioned(testgen::Gen& gen, int n) {
    Matrix A = gen.real_matrix(n, 0.5);
    return A - Matrix::Identity(n, n);
}

}  // namespace

TEST(AssembleMatrix, CentralFdCirculant) {
    const auto g = periodic_grid(4);
    const Matrix A = assemble_matrix({{1.0, {state(2)}}}, g, Scheme::central_fd);
    const double h2 = g.h() * g.h();
    Eigen::Matrix4d expect;
    expect << -2, 1, 0, 1, 1, -2, 1, 0, 0, 1, -2, 1, 1, 0, 1, -2;
    EXPECT_LT(max_abs(Matrix(A - expect.cast<Complex>() / h2)), 1e-12);
}

TEST(AssembleMatrix, RejectsNonlinear) {
    EXPECT_THROW(assemble_matrix({{1.0, {state(0), state(0)}}}, periodic_grid(8), Scheme::spectral), LinearityError);
}

TEST(Discretize, EmptyOperatorGivesZeroMatrix) {
    const auto g = periodic_grid(8);
    const TimeGrid t(1.0, 4);
    const auto sys = discretize(OperatorExpr{}, FieldSeries::zeros(8, t), {Vector::Ones(8), 0.0}, g, t, Scheme::spectral);
    EXPECT_EQ(max_abs(sys.A), 0.0);
}

TEST(Discretize, SpectralLaplacianAnnihilatesConstants) {
    const auto g = periodic_grid(16);
    const TimeGrid t(1.0, 4);
    const auto sys = discretize({{1.0, {state(2)}}}, FieldSeries::zeros(16, t), {Vector::Ones(16), 0.0}, g, t, Scheme::spectral);
    EXPECT_LT(max_abs(Vector(sys.A * Vector::Ones(16))), 1e-12);
}

TEST(Discretize, LinearInOperator) {
    testgen::Gen gen(99);
    const auto g = periodic_grid(16);
    for (int trial = 0; trial < 10; ++trial) {
        const OperatorExpr L1{{gen.uniform(), {state(gen.integer(0, 4))}}};
        const OperatorExpr L2{{gen.uniform(), {known(ClosedForm::cos(gen.integer(1, 3))), state(gen.integer(0, 2))}}};
        for (Scheme s : {Scheme::spectral, Scheme::central_fd}) {
            const Matrix sum = assemble_matrix(L1 + L2, g, s);
            const Matrix parts = assemble_matrix(L1, g, s) + assemble_matrix(L2, g, s);
            EXPECT_LE(max_abs(Matrix(sum - parts)), 1e-12 * std::max(1.0, max_abs(parts)));
        }
    }
}

TEST(Discretize, SpectralLaplacianEigenvalues) {
    const int n = 32;
    const auto g = periodic_grid(n);
    const Matrix A = assemble_matrix({{1.0, {state(2)}}}, g, Scheme::spectral);
    for (int k = 1; k <= n / 4; ++k) {
        Vector e(n);
        for (int i = 0; i < n; ++i) e[i] = std::polar(1.0, k * g.x(i));
        const Vector Ae = A * e;
        const Complex lambda = e.dot(Ae) / e.squaredNorm();
        EXPECT_NEAR(lambda.real(), -double(k * k), 1e-8 * k * k);
        EXPECT_LE(max_abs(Vector(Ae - lambda * e)), 1e-8 * k * k);
    }
}

TEST(Discretize, DirichletRowsCarryRates) {
    const auto g = build_grid(0.0, 1.0, 9, false);
    const TimeGrid t(1.0, 4);
    BoundaryRows rows{{0, 8}, std::vector<Vector>(5, Vector::Constant(2, 3.0))};
    const auto sys = discretize({{1.0, {state(2)}}}, FieldSeries::zeros(9, t), {Vector::Zero(9), 0.0}, g, t,
                                Scheme::central_fd, &rows);
    EXPECT_EQ(max_abs(Vector(sys.A.row(0).transpose())), 0.0);
    EXPECT_EQ(max_abs(Vector(sys.A.row(8).transpose())), 0.0);
    EXPECT_EQ(sys.b[2][0], Complex(3.0));
    const auto u = integrate_rk4(sys);
    EXPECT_NEAR(u[4].values[8].real(), 3.0, 1e-12);
}

TEST(Rk4, ScalarDecay) {
    const auto sys = constant_system(Matrix::Constant(1, 1, -1.0), Vector::Ones(1), Vector::Zero(1), TimeGrid(1.0, 100));
    EXPECT_NEAR(integrate_rk4(sys)[100].values[0].real(), std::exp(-1.0), 1e-9);
}

TEST(Rk4, FourthOrderConvergence) {
    // Damped rotation u' = [[-0.1, 1], [-1, -0.1]] u with a closed-form solution.
    Matrix A(2, 2);
    A << -0.1, 1.0, -1.0, -0.1;
    Vector a(2);
    a << 1.0, 0.0;
    auto err = [&](int steps) {
        const auto u = integrate_rk4(constant_system(A, a, Vector::Zero(2), TimeGrid(2.0, steps)));
        Vector exact(2);
        exact << std::exp(-0.2) * std::cos(2.0), -std::exp(-0.2) * std::sin(2.0);
        return max_abs(u[steps].values - exact);
    };
    const double ratio = err(20) / err(40);
    EXPECT_GT(ratio, 14.0);
    EXPECT_LT(ratio, 18.0);
}

TEST(Rk4, AveragedForcingIsSecondOrder) {
    // u' = -u + sin t: the half-step forcing is the average of the endpoint samples.
    auto err = [](int steps) {
        const TimeGrid time(2.0, steps);
        LinearSystem sys{Matrix::Constant(1, 1, -1.0), {}, Vector::Ones(1), time};
        for (int k = 0; k < time.n_nodes(); ++k) sys.b.push_back(Vector::Constant(1, std::sin(time.t(k))));
        const double exact = 1.5 * std::exp(-2.0) + 0.5 * (std::sin(2.0) - std::cos(2.0));
        return std::abs(integrate_rk4(sys)[steps].values[0] - exact);
    };
    const double ratio = err(20) / err(40);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
}

TEST(Rk4, StabilityWarning) {
    const auto sys = constant_system(Matrix::Constant(1, 1, -100.0), Vector::Ones(1), Vector::Zero(1), TimeGrid(0.1, 2));
    std::vector<std::string> kinds;
    Rk4Options opts;
    opts.warn = [&](const std::string& k, const std::string&) { kinds.push_back(k); };
    integrate_rk4(sys, opts);
    ASSERT_EQ(kinds.size(), 1u);
    EXPECT_EQ(kinds.front(), "StabilityWarning");
}

TEST(Rk4, BlowUpRaisesNaNError) {
    const auto sys = constant_system(Matrix::Constant(1, 1, -1e6), Vector::Ones(1), Vector::Zero(1), TimeGrid(400.0, 40));
    EXPECT_THROW(integrate_rk4(sys), NaNError);
}

TEST(Expm, NilpotentIsIPlusAt) {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 1) = 1.0;
    Vector a(2);
    a << 0.0, 1.0;
    const auto u = integrate_expm(constant_system(A, a, Vector::Zero(2), TimeGrid(1.0, 1)));
    EXPECT_LT(std::abs(u[1].values[0] - 1.0), 1e-14);
    EXPECT_LT(std::abs(u[1].values[1] - 1.0), 1e-14);
}

TEST(Expm, ZeroSystemIsIdentity) {
    testgen::Gen gen(3);
    const Vector a = gen.complex_vector(5);
    const auto u = integrate_expm(constant_system(Matrix::Zero(5, 5), a, Vector::Zero(5), TimeGrid(1.0, 10)));
    for (const auto& s : u.snapshots) EXPECT_EQ(max_abs(Vector(s.values - a)), 0.0);
}

TEST(Expm, ConstantForcingIsExact) {
    // u' = -2u + 1, u(0) = 0  =>  u = (1 - e^{-2t}) / 2
    const auto u = integrate_expm(constant_system(Matrix::Constant(1, 1, -2.0), Vector::Zero(1), Vector::Ones(1), TimeGrid(1.0, 3)));
    EXPECT_NEAR(u[3].values[0].real(), 0.5 * (1.0 - std::exp(-2.0)), 1e-13);
}

TEST(Expm, AgreesWithRk4OnRandomSystems) {
    testgen::Gen gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = well_conditioned(gen, 8);
        const auto sys = constant_system(A, gen.real_vector(8), gen.real_vector(8), TimeGrid(1.0, 200));
        EXPECT_LT(max_abs_diff(integrate_expm(sys), integrate_rk4(sys)), 1e-7) << trial;
    }
}

TEST(Expm, SemigroupProperty) {
    testgen::Gen gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix A = gen.complex_matrix(6);
        const Vector a = gen.complex_vector(6);
        const auto two = integrate_expm(constant_system(A, a, Vector::Zero(6), TimeGrid(0.6, 2)));
        const auto one = integrate_expm(constant_system(A, a, Vector::Zero(6), TimeGrid(0.6, 1)));
        EXPECT_LT(max_abs(Vector(two[2].values - one[1].values)), 1e-10);
    }
}

TEST(Expm, RejectsMismatchedForcing) {
    LinearSystem sys{Matrix::Zero(2, 2), {Vector::Zero(2)}, Vector::Zero(2), TimeGrid(1.0, 4)};
    EXPECT_THROW(integrate_expm(sys), DomainError);
}

TEST(Reference, LinearProblemMatchesRk4) {
    const auto p = make_builtin("heat", {.n = 16, .n_steps = 100}).problem;
    const auto ref = solve_nonlinear_reference(p, 1);
    const auto sys = discretize(p.nonlinearity, p.forcing, p.initial, p.grid, p.time, p.scheme);
    EXPECT_LT(max_abs_diff(ref, integrate_rk4(sys)), 1e-9);
}

TEST(Reference, RefinedHeatMatchesClosedForm) {
    const auto p = make_builtin("heat", {.n = 16, .n_steps = 50}).problem;
    const auto ref = solve_nonlinear_reference(p, 2);
    const auto exact = sample([](double x, double t) { return Complex(std::exp(-0.1 * t) * std::sin(x)); }, p.grid, p.time);
    EXPECT_LT(max_abs_diff(ref, exact), 1e-10);
}

TEST(Reference, BurgersMaxNormNonIncreasing) {
    const auto p = make_builtin("burgers", {.n = 64, .n_steps = 500}).problem;
    const auto ref = solve_nonlinear_reference(p, 1);
    double prev = max_abs(ref[0].values);
    for (int k = 1; k < ref.size(); ++k) {
        const double cur = max_abs(ref[k].values);
        EXPECT_LE(cur, prev + 1e-12) << "step " << k;
        prev = cur;
    }
}

TEST(Reference, ZeroIsFixedPoint) {
    auto p = make_builtin("reaction_diffusion", {.n = 16, .n_steps = 50}).problem;
    p.initial_fn = [](double, double) { return Complex(0.0); };
    p.initial.values.setZero();
    EXPECT_EQ(solve_nonlinear_reference(p, 2).max_abs(), 0.0);
}

TEST(Reference, DirichletBoundaryFollowsTrace) {
    const auto g = build_grid(0.0, 1.0, 21, false);
    auto beta = [](double t) { return Complex(1.0 + t); };
    auto p = make_problem("d", g, TimeGrid(0.2, 200), {{1.0, {state(2)}}}, [](double, double) { return Complex(1.0); },
                          {}, BoundarySpec::dirichlet(beta, [](double) { return Complex(1.0); }));
    const auto ref = solve_nonlinear_reference(p, 1);
    EXPECT_NEAR(ref[200].values[0].real(), 1.2, 1e-12);
    EXPECT_NEAR(ref[200].values[20].real(), 1.2, 1e-12);
}

TEST(Reference, RejectsBadRefine) {
    EXPECT_THROW(solve_nonlinear_reference(make_builtin("heat").problem, 0), ConfigError);
}

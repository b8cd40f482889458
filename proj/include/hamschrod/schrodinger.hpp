#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hamschrod/classical.hpp"
#include "hamschrod/fft.hpp"
#include "hamschrod/parallel.hpp"

// Classical emulation of the Schrodingerisation solve of du/dt = A u + b.
//
// The system is homogenized to d(u,1)/dt = [[A, b],[0, 0]] (u,1), the generator is split
// into Hermitian parts A = H1 + i H2, and the state is extended along an auxiliary
// variable p as w(0, p) = profile(p) u0 with profile(p) = exp(-p) for p >= 0. Then
//     dw/dt = -H1' dw/dp + i H2 w,   H1' = H1 - mu I <= 0,
// which is a Schrodinger equation for every Fourier mode xi of p:
//     d w_xi/dt = i (H2 - xi H1') w_xi.
// Because H1' is negative semidefinite, information travels toward negative p, so on
// p > 0 the profile is never contaminated and u(t) = exp(mu t) exp(p*) w(t, p*).

namespace hamschrod {

enum class WarpProfile {
    smooth,   // exp(-|p|) with the kink at p = 0 replaced by a C-infinity blend on [-4, 0]
    abs_exp,  // exp(-|p|) exactly
};

struct HermitianSplit {
    Matrix H1;
    Matrix H2;
    double mu = 0.0;
    double lambda_min = 0.0;  // extreme eigenvalues of H1
    double lambda_max = 0.0;

    int dim() const { return static_cast<int>(H1.rows()); }
    /// Spectral norm of H1 - mu I, i.e. the fastest transport speed along p.
    double transport_speed() const { return std::max(0.0, mu - lambda_min); }
};

inline HermitianSplit hermitian_split(const Matrix& A, double mu_margin) {
    if (A.rows() != A.cols()) throw DomainError("hermitian_split needs a square matrix");
    if (!A.allFinite()) throw DomainError("hermitian_split: matrix has non-finite entries");
    if (mu_margin < 0.0) throw ConfigError("mu_margin must be >= 0");
    HermitianSplit s;
    const Matrix Ah = A.adjoint();
    s.H1 = 0.5 * (A + Ah);
    s.H2 = (A - Ah) / Complex(0.0, 2.0);
    if (A.size() == 0) return s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.H1, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("eigenvalues of H1 did not converge");
    s.lambda_min = es.eigenvalues().minCoeff();
    s.lambda_max = es.eigenvalues().maxCoeff();
    s.mu = std::max(0.0, s.lambda_max) + mu_margin;
    return s;
}

struct SchrodConfig {
    int N_p = 1024;
    double L_p = 20.0;
    double p_star = 0.0;  // <= 0 selects the smallest p-node >= p_star_min
    double dt = 0.0;      // <= 0 takes the step of the system being solved
    double mu_margin = 0.1;
    WarpProfile profile = WarpProfile::smooth;
    double tail_eps = 1e-12;
    double p_star_min = 0.5;

    double dp() const { return 2.0 * std::numbers::pi * L_p / N_p; }
    double p(int j) const { return -std::numbers::pi * L_p + j * dp(); }
    double half_width() const { return std::numbers::pi * L_p; }

    int p_star_index() const {
        const double target = p_star > 0.0 ? p_star : p_star_min;
        const double raw = (target + half_width()) / dp();
        if (p_star > 0.0) return static_cast<int>(std::lround(raw));
        return static_cast<int>(std::ceil(raw - 1e-9));
    }

    double p_star_value() const { return p(p_star_index()); }

    void validate() const {
        if (N_p < 4 || (N_p & (N_p - 1)) != 0) throw ConfigError("N_p must be a power of two >= 4");
        if (!(L_p > 0.0)) throw ConfigError("L_p must be positive");
        if (mu_margin < 0.0) throw ConfigError("mu_margin must be >= 0");
        if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw ConfigError("tail_eps must lie in (0, 1)");
        if (p_star > 0.0) {
            const double raw = (p_star + half_width()) / dp();
            if (std::abs(raw - std::round(raw)) > 1e-6) {
                throw ConfigError("p_star = " + std::to_string(p_star) + " is not a node of the p grid");
            }
        } else if (!(p_star_min > 0.0)) {
            throw ConfigError("p_star_min must be positive");
        }
        const int j = p_star_index();
        if (j <= N_p / 2 || j >= N_p) throw ConfigError("p_star must be a positive node inside the p domain");
    }

    /// Longest evolution a single warp supports before transport at `speed` can carry
    /// data from the periodic seam to p*.
    double max_horizon(double speed) const {
        const double budget = half_width() - p_star_value() - std::log(1.0 / tail_eps);
        if (budget <= 0.0) return 0.0;
        return speed > 0.0 ? budget / speed : std::numeric_limits<double>::infinity();
    }

    /// Slack in the support bound pi L_p >= p* + speed t + ln(1/eps).
    double wrap_margin(double speed, double t) const {
        return half_width() - (p_star_value() + speed * t + std::log(1.0 / tail_eps));
    }
};

inline double warp_profile(double p, WarpProfile kind) {
    if (kind == WarpProfile::abs_exp || p >= 0.0) return std::exp(-std::abs(p));
    constexpr double width = 4.0;
    if (p <= -width) return std::exp(p);
    // C-infinity step s(p): 0 at -width, 1 at 0.
    auto bump = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double x = (p + width) / width;
    const double s = bump(x) / (bump(x) + bump(1.0 - x));
    return s * std::exp(-p) + (1.0 - s) * std::exp(p);
}

using ModeArray = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Fourier modes of the warped state along p; row k holds w_hat(xi_k).
struct WarpedState {
    ModeArray modes;
    double L_p = 0.0;
    int N_p = 0;
    std::vector<double> xi;

    int dim() const { return static_cast<int>(modes.cols()); }

    /// Inverse DFT along p evaluated at node j.
    Vector at_node(int j) const {
        Vector w = Vector::Zero(dim());
        for (int k = 0; k < N_p; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(k) * j) % N_p) / N_p;
            w += modes.row(k).transpose() * std::polar(1.0, angle);
        }
        return w / static_cast<double>(N_p);
    }

    /// sum_j |w(p_j)|^2 dp, computed from the modes through Parseval.
    double p_energy() const {
        const double dp = 2.0 * std::numbers::pi * L_p / N_p;
        return modes.squaredNorm() / N_p * dp;
    }
};

inline std::vector<double> p_frequencies(int N_p, double L_p) {
    std::vector<double> xi(N_p);
    for (int k = 0; k < N_p; ++k) xi[k] = fft::signed_index(k, N_p) / L_p;
    return xi;
}

/// DFT of the warp profile sampled on the p grid.
inline Vector profile_transform(const SchrodConfig& cfg) {
    Vector profile(cfg.N_p);
    for (int j = 0; j < cfg.N_p; ++j) profile[j] = warp_profile(cfg.p(j), cfg.profile);
    return fft::forward(profile);
}

inline WarpedState warp_initialize(const Vector& u0, const SchrodConfig& cfg) {
    cfg.validate();
    WarpedState s{ModeArray(cfg.N_p, u0.size()), cfg.L_p, cfg.N_p, p_frequencies(cfg.N_p, cfg.L_p)};
    // The initial data separates as profile(p) * u0, so one transform serves every component.
    s.modes.noalias() = profile_transform(cfg) * u0.transpose();
    return s;
}

/// Per-mode unitaries exp(i (H2 - xi_k H1') t) for a fixed split and duration. In the
/// general case the unitaries are stored when they fit in `memory_budget` bytes and
/// rebuilt on every application otherwise.
class ModePropagators {
public:
    ModePropagators(const HermitianSplit& split, const std::vector<double>& xi, double t,
                    std::size_t memory_budget = std::size_t(512) << 20)
        : xi_(xi), t_(t) {
        const int d = split.dim();
        if (d == 0) return;
        shifted_ = split.H1 - split.mu * Matrix::Identity(d, d);
        const double h2_norm = split.H2.cwiseAbs().maxCoeff();
        const double h1_spread = (shifted_ - shifted_(0, 0) * Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
        if (h2_norm == 0.0) {
            kind_ = Kind::generator_h1;
            eigen(shifted_);
        } else if (h1_spread == 0.0) {
            kind_ = Kind::generator_h2;
            shift_ = shifted_(0, 0).real();
            eigen(split.H2);
        } else {
            H2_ = split.H2;
            const std::size_t bytes = (xi_.size() / 2 + 1) * static_cast<std::size_t>(d) * d * sizeof(Complex);
            if (bytes <= memory_budget) build_per_mode();
            else kind_ = Kind::on_the_fly;
        }
    }

    void apply(ModeArray& modes) const {
        const int n_modes = static_cast<int>(modes.rows());
        if (modes.cols() == 0) return;
        parallel_for(static_cast<std::size_t>(n_modes), [&](std::size_t k) {
            Vector w = modes.row(static_cast<Eigen::Index>(k)).transpose();
            modes.row(static_cast<Eigen::Index>(k)) = propagate(static_cast<int>(k), w).transpose();
        });
    }

    Vector propagate(int k, const Vector& w) const {
        switch (kind_) {
            case Kind::generator_h1: {
                // H(xi) = -xi H1'
                Vector c = basis_.adjoint() * w;
                for (int j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, -xi_[k] * lambda_[j] * t_);
                return basis_ * c;
            }
            case Kind::generator_h2: {
                // H(xi) = H2 - xi shift I
                Vector c = basis_.adjoint() * w;
                for (int j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, (lambda_[j] - xi_[k] * shift_) * t_);
                return basis_ * c;
            }
            case Kind::per_mode:
                if (conjugate_of_[k] >= 0) return unitary_[conjugate_of_[k]].conjugate() * w;
                return unitary_[k] * w;
            case Kind::on_the_fly: {
                Eigen::SelfAdjointEigenSolver<Matrix> es(H2_ - xi_[k] * shifted_);
                if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigendecomposition did not converge");
                Vector c = es.eigenvectors().adjoint() * w;
                for (int j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, es.eigenvalues()[j] * t_);
                return es.eigenvectors() * c;
            }
        }
        return w;
    }

private:
    enum class Kind { generator_h1, generator_h2, per_mode, on_the_fly };

    void eigen(const Matrix& H) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigendecomposition did not converge");
        basis_ = es.eigenvectors();
        lambda_ = es.eigenvalues();
    }

    static Matrix unitary(const Matrix& H, double t) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        if (es.info() != Eigen::Success) throw EigenFailure("Hermitian eigendecomposition did not converge");
        const Eigen::VectorXd& lam = es.eigenvalues();
        Vector phase(lam.size());
        for (int j = 0; j < lam.size(); ++j) phase[j] = std::polar(1.0, lam[j] * t);
        return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    }

    void build_per_mode() {
        kind_ = Kind::per_mode;
        const int n_modes = static_cast<int>(xi_.size());
        unitary_.assign(n_modes, Matrix());
        conjugate_of_.assign(n_modes, -1);
        // Real generators give H(-xi) = -conj(H(xi)), hence U(-xi) = conj(U(xi)).
        const bool real_generator =
            shifted_.imag().cwiseAbs().maxCoeff() == 0.0 && H2_.real().cwiseAbs().maxCoeff() == 0.0;
        std::vector<int> todo;
        for (int k = 0; k < n_modes; ++k) {
            if (real_generator && xi_[k] < 0.0) {
                const int mirror = n_modes - k;
                if (mirror > 0 && mirror < n_modes && xi_[mirror] == -xi_[k]) {
                    conjugate_of_[k] = mirror;
                    continue;
                }
            }
            todo.push_back(k);
        }
        parallel_for(todo.size(), [&](std::size_t i) {
            const int k = todo[i];
            unitary_[k] = unitary(H2_ - xi_[k] * shifted_, t_);
        });
    }

    Kind kind_ = Kind::per_mode;
    std::vector<double> xi_;
    double t_ = 0.0;
    double shift_ = 0.0;
    Matrix shifted_;
    Matrix H2_;
    Matrix basis_;
    Eigen::VectorXd lambda_;
    std::vector<Matrix> unitary_;
    std::vector<int> conjugate_of_;
};

/// Evolves every mode by exp(i (H2 - xi_k (H1 - mu I)) t).
inline WarpedState warped_evolve(WarpedState state, const HermitianSplit& split, double t) {
    if (split.dim() != state.dim()) throw DomainError("split dimension does not match warped state");
    ModePropagators(split, state.xi, t).apply(state.modes);
    return state;
}

/// Reads the original variables back: exp(mu t) exp(p*) w(t, p*). Returns every warped
/// component (including a homogenization slot if the state carries one).
inline Vector recover(const WarpedState& state, const HermitianSplit& split, const SchrodConfig& cfg, double t) {
    cfg.validate();
    if (state.N_p != cfg.N_p || state.L_p != cfg.L_p) throw ConfigError("warped state and config disagree on p grid");
    if (cfg.wrap_margin(split.transport_speed(), t) < 0.0) {
        throw WrapError("support bound violated: pi L_p = " + std::to_string(cfg.half_width()) + " < p* + " +
                        std::to_string(split.transport_speed()) + " * " + std::to_string(t) + " + ln(1/eps)");
    }
    const double p_star = cfg.p_star_value();
    return std::exp(split.mu * t + p_star) * state.at_node(cfg.p_star_index());
}

/// Homogenized generator and state for step `step`: [[A, b_mid],[0, 0]] and (u, 1).
inline std::pair<Matrix, Vector> homogenize(const LinearSystem& sys, int step, const Vector& u_current) {
    const int n = sys.n();
    if (step < 0 || step >= sys.time.n_steps()) throw DomainError("homogenize: step index out of range");
    Matrix At = Matrix::Zero(n + 1, n + 1);
    At.topLeftCorner(n, n) = sys.A;
    At.topRightCorner(n, 1) = sys.b_mid(step);
    Vector ut(n + 1);
    ut.head(n) = u_current;
    ut[n] = 1.0;
    return {At, ut};
}

inline std::pair<Matrix, Vector> homogenize(const LinearSystem& sys, int step) { return homogenize(sys, step, sys.a); }

/// Forcing-independent variant for time-dependent forcing: [[A, I],[0, 0]] acting on
/// (u, b_mid). The generator stays fixed from step to step; only the state's forcing
/// block changes.
inline std::pair<Matrix, Vector> homogenize_block(const LinearSystem& sys, int step, const Vector& u_current) {
    const int n = sys.n();
    if (step < 0 || step >= sys.time.n_steps()) throw DomainError("homogenize: step index out of range");
    Matrix At = Matrix::Zero(2 * n, 2 * n);
    At.topLeftCorner(n, n) = sys.A;
    At.topRightCorner(n, n) = Matrix::Identity(n, n);
    Vector ut(2 * n);
    ut.head(n) = u_current;
    ut.tail(n) = sys.b_mid(step);
    return {At, ut};
}

struct SchrodDiagnostics {
    int N_p = 0;
    double L_p = 0.0;
    double mu = 0.0;
    double p_star = 0.0;
    double slot_error = 0.0;   // max deviation of the recovered homogenization slot(s)
    double wrap_margin = 0.0;  // smallest slack in the support bound over the run
    int warps = 0;             // number of warp initializations
    bool block_forcing = false;
};

/// Drop-in replacement for integrate_rk4 / integrate_expm with midpoint-frozen forcing.
///
/// Constant forcing uses the (u, 1) homogenization. Time-dependent forcing uses the
/// (u, b) block form, whose generator does not change between steps; a change of b_mid
/// is injected into the warped state as a freshly warped increment (the evolution is
/// linear, so this is exact). The warped state persists across steps and is rebuilt from
/// the recovered state only when the support bound would otherwise be violated.
inline FieldSeries schrodingerise_solve(const LinearSystem& sys, const SchrodConfig& config,
                                        SchrodDiagnostics* diagnostics = nullptr) {
    sys.check();
    SchrodConfig cfg = config;
    cfg.validate();
    const int n = sys.n();
    const int steps = sys.time.n_steps();
    const double dt = sys.time.dt();
    if (cfg.dt > 0.0 && std::abs(cfg.dt - dt) > 1e-12 * dt) {
        throw ConfigError("SchrodConfig.dt differs from the system time step");
    }
    cfg.dt = dt;

    bool constant_forcing = true;
    for (int k = 1; k < steps && constant_forcing; ++k) constant_forcing = sys.b_mid(k) == sys.b_mid(0);
    auto slot = [&](int k) -> Vector {
        if (constant_forcing) return Vector::Ones(1);
        return sys.b_mid(k);
    };
    const Matrix At = constant_forcing ? homogenize(sys, 0).first : homogenize_block(sys, 0, sys.a).first;
    const int d = static_cast<int>(At.rows());
    const int s_len = d - n;

    const HermitianSplit split = hermitian_split(At, cfg.mu_margin);
    const double mu = split.mu;
    const double speed = split.transport_speed();
    const double horizon = cfg.max_horizon(speed);
    if (horizon < dt) {
        throw WrapError("a single step violates the support bound: speed " + std::to_string(speed) + ", dt " +
                        std::to_string(dt) + ", pi L_p " + std::to_string(cfg.half_width()));
    }

    SchrodDiagnostics diag{cfg.N_p, cfg.L_p, mu, cfg.p_star_value(), 0.0, std::numeric_limits<double>::infinity(),
                           0, !constant_forcing};
    const Vector profile_hat = profile_transform(cfg);
    const std::vector<double> xi = p_frequencies(cfg.N_p, cfg.L_p);
    const ModePropagators propagators(split, xi, dt);

    // Inverse DFT weights for reading node p*.
    const int j_star = cfg.p_star_index();
    Vector read(cfg.N_p);
    for (int k = 0; k < cfg.N_p; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(k) * j_star) % cfg.N_p) / cfg.N_p;
        read[k] = std::polar(1.0 / cfg.N_p, angle);
    }
    const double amplify = std::exp(cfg.p_star_value());

    FieldSeries out;
    out.snapshots.reserve(sys.time.n_nodes());
    out.snapshots.push_back({sys.a, sys.time.t(0)});

    Vector u = sys.a;
    Vector current_slot = slot(0);
    ModeArray modes;
    double elapsed = 0.0;
    bool need_warp = true;

    for (int k = 0; k < steps; ++k) {
        const Vector s = slot(k);
        if (need_warp || elapsed + dt > horizon * (1.0 + 1e-12)) {
            Vector full(d);
            full.head(n) = u;
            full.tail(s_len) = s;
            modes.noalias() = profile_hat * full.transpose();
            elapsed = 0.0;
            need_warp = false;
            ++diag.warps;
        } else if (s != current_slot) {
            // Fresh warp of (0, s - s_old), scaled to the current recovery factor.
            modes.rightCols(s_len).noalias() += (std::exp(-mu * elapsed) * profile_hat) * (s - current_slot).transpose();
        }
        current_slot = s;

        propagators.apply(modes);
        elapsed += dt;

        const Vector full = (std::exp(mu * elapsed) * amplify) * (modes.transpose() * read);
        if (!full.allFinite()) throw NaNError("recovered state is not finite at step " + std::to_string(k + 1));
        const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
        diag.slot_error = std::max(diag.slot_error, (full.tail(s_len) - s).cwiseAbs().maxCoeff() / scale);
        diag.wrap_margin = std::min(diag.wrap_margin, cfg.wrap_margin(speed, elapsed));
        u = full.head(n);
        out.snapshots.push_back({u, sys.time.t(k + 1)});
    }
    if (diagnostics) *diagnostics = diag;
    return out;
}

}  // namespace hamschrod

#pragma once

#include <algorithm>
#include <numbers>
#include <vector>

#include "hamschrod/fft.hpp"
#include "hamschrod/types.hpp"

namespace hamschrod {

inline constexpr int kMaxDerivativeOrder = 4;

namespace detail {

/// Fornberg's recursion: weights w[j] such that f^(order)(x0) ~ sum_j w[j] f(nodes[j]).
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& nodes, int order) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][order];
    return w;
}

inline int centered_half_width(int order) { return (order + 1) / 2; }

inline void check_order(int order) {
    if (order < 0 || order > kMaxDerivativeOrder) {
        throw SchemeError("derivative order " + std::to_string(order) + " outside [0, " +
                          std::to_string(kMaxDerivativeOrder) + "]");
    }
}

}  // namespace detail

/// Second-order finite-difference weights for node i: returns (first node index, weights).
/// Periodic grids use the centered stencil everywhere (indices taken modulo n); bounded
/// grids fall back to one-sided windows of order + 2 nodes near the ends.
inline std::pair<int, std::vector<double>> fd_stencil(const SpatialGrid& grid, int order, int i) {
    detail::check_order(order);
    const int n = grid.n();
    const int r = detail::centered_half_width(order);
    int start = i - r;
    int width = 2 * r + 1;
    if (!grid.periodic() && (i - r < 0 || i + r > n - 1)) {
        width = std::min(order + 2, n);
        start = std::clamp(i - width / 2, 0, n - width);
    }
    std::vector<double> nodes(width);
    for (int j = 0; j < width; ++j) nodes[j] = (start + j - i) * grid.h();
    return {start, detail::fornberg_weights(0.0, nodes, order)};
}

/// order-th spatial derivative of a snapshot.
inline FieldSnapshot differentiate(const FieldSnapshot& field, int order, const SpatialGrid& grid, Scheme scheme) {
    detail::check_order(order);
    const int n = grid.n();
    if (field.size() != n) throw DomainError("snapshot length does not match grid");
    if (order == 0) return field;

    FieldSnapshot out{Vector(n), field.t};
    if (scheme == Scheme::spectral) {
        if (!grid.periodic()) throw SchemeError("spectral differentiation requires a periodic grid");
        Vector hat = fft::forward(field.values);
        const double scale = 2.0 * std::numbers::pi / grid.length();
        for (int j = 0; j < n; ++j) {
            const int kj = fft::signed_index(j, n);
            // The Nyquist mode has no consistent sign for odd derivatives.
            if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
                hat[j] = 0.0;
                continue;
            }
            hat[j] *= std::pow(Complex(0.0, kj * scale), order);
        }
        fft::inverse(hat.data(), out.values.data(), n);
        return out;
    }

    if (grid.periodic()) {
        auto [start, w] = fd_stencil(grid, order, 0);
        const int width = static_cast<int>(w.size());
        for (int i = 0; i < n; ++i) {
            Complex acc = 0.0;
            for (int j = 0; j < width; ++j) acc += w[j] * field.values[((i + start + j) % n + n) % n];
            out.values[i] = acc;
        }
        return out;
    }

    const int r = detail::centered_half_width(order);
    auto [c0, interior] = fd_stencil(grid, order, std::min(r, n - 1));
    for (int i = 0; i < n; ++i) {
        const bool centered = i - r >= 0 && i + r <= n - 1;
        auto [start, w] = centered ? std::pair{i - r, interior} : fd_stencil(grid, order, i);
        Complex acc = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * field.values[start + static_cast<int>(j)];
        out.values[i] = acc;
    }
    return out;
}

}  // namespace hamschrod

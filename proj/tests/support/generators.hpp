#pragma once

// Seeded random inputs for property tests.

#include <cmath>
#include <numbers>
#include <random>

#include "hamschrod/hamschrod.hpp"

namespace testgen {

using hamschrod::Complex;
using hamschrod::Matrix;
using hamschrod::Vector;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    Complex complex(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }

    Matrix real_matrix(int n, double r = 1.0) {
        Matrix A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = uniform(-r, r);
        return A;
    }

    Matrix complex_matrix(int n, double r = 1.0) {
        Matrix A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = complex(r);
        return A;
    }

    Vector real_vector(int n, double r = 1.0) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(-r, r);
        return v;
    }

    Vector complex_vector(int n, double r = 1.0) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = complex(r);
        return v;
    }

    /// Random trigonometric polynomial of degree <= max_k sampled on a periodic grid;
    /// smooth, so spectral derivatives stay O(1).
    Vector trig_field(const hamschrod::SpatialGrid& g, int max_k = 3, bool complex_valued = false) {
        std::vector<Complex> a(max_k + 1), b(max_k + 1);
        for (int k = 0; k <= max_k; ++k) {
            a[k] = complex_valued ? complex(0.5) : Complex(uniform(-0.5, 0.5));
            b[k] = complex_valued ? complex(0.5) : Complex(uniform(-0.5, 0.5));
        }
        Vector v(g.n());
        for (int i = 0; i < g.n(); ++i) {
            Complex s = 0.0;
            for (int k = 0; k <= max_k; ++k) s += a[k] * std::cos(k * g.x(i)) + b[k] * std::sin(k * g.x(i));
            v[i] = s;
        }
        return v;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

inline hamschrod::SpatialGrid periodic_grid(int n) { return {0.0, 2.0 * std::numbers::pi, n, true}; }

}  // namespace testgen

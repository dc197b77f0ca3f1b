#pragma once

// Slow, direct implementations used only to check the library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tenscomp/tensor.hpp"

namespace oracle {

using tenscomp::Complex;
using tenscomp::ComplexTensor;
using tenscomp::DenseTensor;
using tenscomp::Shape;

inline DenseTensor random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    DenseTensor t(shape);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
    return t;
}

inline std::vector<Complex> naive_dft(const std::vector<Complex>& x, bool inverse = false) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += x[j] * Complex(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

/// DFT of every tube t(i1, i2, :) of an order-3 tensor by the O(n^2) sum.
inline ComplexTensor naive_dft_mode3(const DenseTensor& t) {
    const std::size_t n1 = t.extent(0), n2 = t.extent(1), n3 = t.extent(2);
    ComplexTensor out(t.shape());
    for (std::size_t a = 0; a < n1; ++a) {
        for (std::size_t b = 0; b < n2; ++b) {
            std::vector<Complex> tube(n3);
            for (std::size_t k = 0; k < n3; ++k) tube[k] = t(a, b, k);
            const auto f = naive_dft(tube);
            for (std::size_t k = 0; k < n3; ++k) out(a, b, k) = f[k];
        }
    }
    return out;
}

/// Block-circulant matrix of an n1 x n2 x n3 tensor: block (r, c) is
/// frontal slice (r - c) mod n3.
inline Eigen::MatrixXd bcirc(const DenseTensor& a) {
    const std::size_t n1 = a.extent(0), n2 = a.extent(1), n3 = a.extent(2);
    Eigen::MatrixXd m(n1 * n3, n2 * n3);
    for (std::size_t r = 0; r < n3; ++r) {
        for (std::size_t c = 0; c < n3; ++c) {
            const std::size_t s = (r + n3 - c) % n3;
            for (std::size_t i = 0; i < n1; ++i) {
                for (std::size_t j = 0; j < n2; ++j) m(r * n1 + i, c * n2 + j) = a(i, j, s);
            }
        }
    }
    return m;
}

/// Stacks the frontal slices of b (n2 x m x n3) into an (n2 n3) x m matrix.
inline Eigen::MatrixXd unfold_vertical(const DenseTensor& b) {
    const std::size_t n2 = b.extent(0), m = b.extent(1), n3 = b.extent(2);
    Eigen::MatrixXd out(n2 * n3, m);
    for (std::size_t s = 0; s < n3; ++s) {
        for (std::size_t i = 0; i < n2; ++i) {
            for (std::size_t j = 0; j < m; ++j) out(s * n2 + i, j) = b(i, j, s);
        }
    }
    return out;
}

/// a * b via bcirc(a) * unfold(b), folded back.
inline DenseTensor t_product(const DenseTensor& a, const DenseTensor& b) {
    const std::size_t n1 = a.extent(0), m = b.extent(1), n3 = a.extent(2);
    const Eigen::MatrixXd c = bcirc(a) * unfold_vertical(b);
    DenseTensor out({n1, m, n3});
    for (std::size_t s = 0; s < n3; ++s) {
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < m; ++j) out(i, j, s) = c(s * n1 + i, j);
        }
    }
    return out;
}

/// Singular values (descending) from the eigenvalues of A^H A, or A A^H
/// when that is smaller.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd g = a.rows() >= a.cols() ? Eigen::MatrixXcd(a.adjoint() * a) : Eigen::MatrixXcd(a * a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
    return ev;
}

/// Piecewise MCP written out directly.
inline double mcp(double y, double lambda, double gamma) {
    const double a = std::abs(y);
    return a <= gamma * lambda ? lambda * a - a * a / (2.0 * gamma) : gamma * lambda * lambda / 2.0;
}

/// min over upsilon in [0, upper] of (2 upsilon |y| + (upsilon - lambda gamma)^2) / (2 gamma)
/// on a uniform grid with the given step.
inline double grid_min_bemcp(double y, double lambda, double gamma, double upper, double step) {
    double best = std::numeric_limits<double>::infinity();
    const auto n = static_cast<std::size_t>(std::ceil(upper / step));
    for (std::size_t k = 0; k <= n; ++k) {
        const double u = std::min(static_cast<double>(k) * step, upper);
        const double d = u - lambda * gamma;
        best = std::min(best, (2.0 * u * std::abs(y) + d * d) / (2.0 * gamma));
    }
    return best;
}

/// argmin over g of (g - y)^2 / 2 + mcp(g) on a uniform grid over [lo, hi].
inline double grid_argmin_prox(double y, double lambda, double gamma, double lo, double hi, double step) {
    double best = std::numeric_limits<double>::infinity();
    double arg = lo;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    for (std::size_t k = 0; k <= n; ++k) {
        const double g = std::min(lo + static_cast<double>(k) * step, hi);
        const double f = 0.5 * (g - y) * (g - y) + mcp(g, lambda, gamma);
        if (f < best) {
            best = f;
            arg = g;
        }
    }
    return arg;
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double frob(const DenseTensor& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

}  // namespace oracle

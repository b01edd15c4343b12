// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, independent of the library's evaluation paths:
// finite-difference derivatives and 2D Gauss-Legendre quadrature of the
// half-space Green's function for rectangular patches.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

// Central-difference gradient of a scalar field.
template <typename F>
Eigen::Vector3d fd_gradient(F&& f, const Eigen::Vector3d& r, double h) {
    Eigen::Vector3d g;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[i] = h;
        g[i] = (f(r + e) - f(r - e)) / (2.0 * h);
    }
    return g;
}

// Central-difference Hessian of a scalar field.
template <typename F>
Eigen::Matrix3d fd_hessian(F&& f, const Eigen::Vector3d& r, double h) {
    Eigen::Matrix3d out;
    const double f0 = f(r);
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d ei = Eigen::Vector3d::Zero();
        ei[i] = h;
        out(i, i) = (f(r + ei) - 2.0 * f0 + f(r - ei)) / (h * h);
        for (int k = i + 1; k < 3; ++k) {
            Eigen::Vector3d ek = Eigen::Vector3d::Zero();
            ek[k] = h;
            out(i, k) = out(k, i) = (f(r + ei + ek) - f(r + ei - ek) -
                                     f(r - ei + ek) + f(r - ei - ek)) /
                                    (4.0 * h * h);
        }
    }
    return out;
}

// 2D central-difference versions for strip potentials phi(x, y).
template <typename F>
Eigen::Vector2d fd_gradient2(F&& f, double x, double y, double h) {
    return {(f(x + h, y) - f(x - h, y)) / (2.0 * h),
            (f(x, y + h) - f(x, y - h)) / (2.0 * h)};
}

template <typename F>
Eigen::Matrix2d fd_hessian2(F&& f, double x, double y, double h) {
    Eigen::Matrix2d out;
    const double f0 = f(x, y);
    out(0, 0) = (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h);
    out(1, 1) = (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h);
    out(0, 1) = out(1, 0) = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) +
                             f(x - h, y - h)) /
                            (4.0 * h * h);
    return out;
}

// Gauss-Legendre nodes on [-1, 1], n = 32.
inline const std::array<double, 32>& gl32_nodes() {
    static const std::array<double, 32> x = [] {
        std::array<double, 32> nodes{};
        // Newton iteration on Legendre P_32.
        for (int i = 0; i < 32; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (32 + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= 32; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const double dp = 32.0 * (z * p1 - p0) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / dp;
                if (std::abs(z - z1) < 1e-15) break;
            }
            nodes[i] = z;
        }
        return nodes;
    }();
    return x;
}

inline const std::array<double, 32>& gl32_weights() {
    static const std::array<double, 32> w = [] {
        std::array<double, 32> weights{};
        const auto& x = gl32_nodes();
        for (int i = 0; i < 32; ++i) {
            const double z = x[i];
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= 32; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = 32.0 * (z * p1 - p0) / (z * z - 1.0);
            weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return weights;
    }();
    return w;
}

// Potential of a rectangle [x0,x1]x[z0,z1] at unit bias via quadrature of
// the half-space Dirichlet kernel y / (2 pi rho^3), with panel subdivision
// until convergence.
inline double patch_potential_quadrature(double x0, double x1, double z0, double z1,
                                         const Eigen::Vector3d& r) {
    const auto& xs = gl32_nodes();
    const auto& ws = gl32_weights();
    auto panel = [&](double a0, double a1, double b0, double b1) {
        const double jx = 0.5 * (a1 - a0), jz = 0.5 * (b1 - b0);
        const double cx = 0.5 * (a0 + a1), cz = 0.5 * (b0 + b1);
        double sum = 0.0;
        for (int i = 0; i < 32; ++i) {
            const double xp = cx + jx * xs[i];
            for (int j = 0; j < 32; ++j) {
                const double zp = cz + jz * xs[j];
                const double dx = r.x() - xp;
                const double dz = r.z() - zp;
                const double rho2 = dx * dx + r.y() * r.y() + dz * dz;
                sum += ws[i] * ws[j] / (rho2 * std::sqrt(rho2));
            }
        }
        return sum * jx * jz * r.y() / (2.0 * M_PI);
    };
    double prev = 0.0;
    for (int div = 1; div <= 16; div *= 2) {
        double total = 0.0;
        for (int i = 0; i < div; ++i) {
            for (int j = 0; j < div; ++j) {
                const double a0 = x0 + (x1 - x0) * i / div;
                const double a1 = x0 + (x1 - x0) * (i + 1) / div;
                const double b0 = z0 + (z1 - z0) * j / div;
                const double b1 = z0 + (z1 - z0) * (j + 1) / div;
                total += panel(a0, a1, b0, b1);
            }
        }
        if (div > 1 && std::abs(total - prev) < 1e-10 * std::abs(total)) return total;
        prev = total;
    }
    return prev;
}

inline std::mt19937& rng() {
    static std::mt19937 gen(20260809u);
    return gen;
}

inline double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng());
}

}  // namespace oracle

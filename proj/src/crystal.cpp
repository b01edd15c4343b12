// SPDX-License-Identifier: Apache-2.0
//
// Ion-chain equilibria in dimensionless coordinates u = z / s, where the
// total potential becomes sum(u_i^2)/2 + sum_{i<j} 1/|u_i - u_j| and the
// Hessian is I plus a weighted graph Laplacian (positive definite for any
// ordered configuration, so damped Newton converges globally).

#include "iontrap/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace iontrap {

namespace {

double chain_potential(const Eigen::VectorXd& u) {
    double v = 0.5 * u.squaredNorm();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (Eigen::Index j = i + 1; j < u.size(); ++j)
            v += 1.0 / std::abs(u[i] - u[j]);
    return v;
}

Eigen::VectorXd chain_gradient(const Eigen::VectorXd& u) {
    Eigen::VectorXd g = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = 0; j < u.size(); ++j) {
            if (i == j) continue;
            const double d = u[i] - u[j];
            g[i] -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
        }
    }
    return g;
}

Eigen::MatrixXd chain_hessian(const Eigen::VectorXd& u) {
    const Eigen::Index n = u.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            h(i, i) += c;
            h(i, j) -= c;
        }
    }
    return h;
}

}  // namespace

double chain_length_scale(const IonSpecies& species, double omega_z) {
    if (!(omega_z > 0.0)) throw ValidationError("axial frequency must be positive");
    const double q = species.charge_coulomb();
    return std::cbrt(q * q / (4.0 * std::numbers::pi * constants::epsilon0 *
                              species.mass_kg() * omega_z * omega_z));
}

ChainSolution chain_equilibrium(const ChainConfig& config) {
    if (config.n < 1) throw ValidationError("ion count must be >= 1");
    if (config.n > config.max_ions)
        throw ValidationError("ion count exceeds the configured cap of " +
                              std::to_string(config.max_ions));
    const double s = chain_length_scale(config.species, config.omega_z);
    const Eigen::Index n = config.n;

    // Uniformly spaced start with the empirical N^0.56 length scaling.
    Eigen::VectorXd u(n);
    const double extent = std::pow(static_cast<double>(n), 0.56);
    for (Eigen::Index i = 0; i < n; ++i)
        u[i] = n == 1 ? 0.0
                      : extent * (2.0 * static_cast<double>(i) / (n - 1) - 1.0);

    constexpr double tol = 1e-12;
    bool converged = false;
    Eigen::VectorXd g = chain_gradient(u);
    for (int it = 0; it < 200; ++it) {
        if (g.norm() < tol * std::sqrt(static_cast<double>(n))) {
            converged = true;
            break;
        }
        const Eigen::VectorXd step = chain_hessian(u).ldlt().solve(-g);
        // Backtrack so that the ordering is preserved and the energy drops.
        const double v0 = chain_potential(u);
        double lambda = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 50; ++bt) {
            Eigen::VectorXd cand = u + lambda * step;
            bool ordered = true;
            for (Eigen::Index i = 0; i + 1 < n; ++i)
                if (!(cand[i] < cand[i + 1])) ordered = false;
            if (ordered && chain_potential(cand) < v0) {
                u = std::move(cand);
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) break;
        g = chain_gradient(u);
    }
    if (!converged && g.norm() >= 1e-10 * std::sqrt(static_cast<double>(n)))
        throw OptimizationError("chain equilibrium did not converge (|g| = " +
                                std::to_string(g.norm()) + ")");

    ChainSolution sol;
    sol.config = config;
    sol.length_scale = s;
    sol.positions_scaled = u;
    sol.positions = s * u;
    sol.spacings.resize(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        sol.spacings[i] = sol.positions[i + 1] - sol.positions[i];
    sol.residual = g.norm();
    return sol;
}

ChainModes chain_normal_modes(const ChainSolution& solution) {
    const Eigen::MatrixXd a = chain_hessian(solution.positions_scaled);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const double tol = 1e-9 * es.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < -tol)
            throw UnstableEquilibriumError(
                "chain Hessian is indefinite: not a potential minimum");
    ChainModes modes;
    modes.frequencies = (es.eigenvalues().cwiseMax(0.0)).cwiseSqrt() *
                        solution.config.omega_z;
    modes.vectors = es.eigenvectors();
    return modes;
}

void write_chain_report(std::ostream& os, const ChainSolution& solution,
                        const ChainModes& modes) {
    os.precision(12);
    os << "ion,z_m,z_over_s\n";
    for (Eigen::Index i = 0; i < solution.positions.size(); ++i)
        os << i << ',' << solution.positions[i] << ','
           << solution.positions_scaled[i] << '\n';
    os << "mode,frequency_Hz";
    for (Eigen::Index i = 0; i < solution.positions.size(); ++i)
        os << ",c" << i;
    os << '\n';
    for (Eigen::Index m = 0; m < modes.frequencies.size(); ++m) {
        os << m << ',' << hz_from_angular(modes.frequencies[m]);
        for (Eigen::Index i = 0; i < modes.vectors.rows(); ++i)
            os << ',' << modes.vectors(i, m);
        os << '\n';
    }
}

}  // namespace iontrap

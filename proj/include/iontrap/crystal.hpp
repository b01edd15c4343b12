// SPDX-License-Identifier: Apache-2.0
//
// crystal.hpp -- static equilibria and axial normal modes of a linear ion
// chain in a harmonic well, balancing the trap force against the mutual
// Coulomb repulsion.  Positions come out in metres and in units of the
// characteristic spacing s = (q^2 / (4 pi eps0 m w_z^2))^(1/3).

#pragma once

#include <iosfwd>

#include <Eigen/Dense>

#include "iontrap/core.hpp"

namespace iontrap {

struct ChainConfig {
    IonSpecies species = IonSpecies::from_mass(1.0, 1);
    int n = 1;             // ion count
    double omega_z = 0.0;  // rad/s
    int max_ions = 50;
};

struct ChainSolution {
    ChainConfig config;
    double length_scale = 0.0;          // s (m)
    Eigen::VectorXd positions;          // m, ascending
    Eigen::VectorXd positions_scaled;   // units of s
    Eigen::VectorXd spacings;           // adjacent gaps (m)
    double residual = 0.0;              // dimensionless gradient norm at the solution
};

struct ChainModes {
    Eigen::VectorXd frequencies;  // rad/s, ascending
    Eigen::MatrixXd vectors;      // columns match frequencies
};

// s = (q^2 / (4 pi eps0 m w_z^2))^(1/3).
double chain_length_scale(const IonSpecies& species, double omega_z);

// Newton minimisation of the total potential; residual force per ion below
// 1e-10 of the natural force scale.
ChainSolution chain_equilibrium(const ChainConfig& config);

// Axial normal modes from the Hessian at the equilibrium.
ChainModes chain_normal_modes(const ChainSolution& solution);

// Comma-separated positions and mode table.
void write_chain_report(std::ostream& os, const ChainSolution& solution,
                        const ChainModes& modes);

}  // namespace iontrap

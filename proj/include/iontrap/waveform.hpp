// SPDX-License-Identifier: Apache-2.0
//
// waveform.hpp -- multizone axial potential engineering: per-electrode basis
// potentials along the trap axis, voltage solutions for target wells,
// transport sequences, and separation ramps built from the quadratic/quartic
// decomposition of the axial potential.
//
// Derivatives of the basis are extracted by local 7-point polynomial fits on
// the z-grid; all reported diagnostics are recomputed independently from the
// analytic composed potential (direct minimisation plus finite differences),
// never read back from the fit.

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "iontrap/core.hpp"
#include "iontrap/surface_fields.hpp"

namespace iontrap {

// min ||A x - b||_2 subject to lower <= x <= upper, by a primal active-set
// iteration.  A must have full column rank (append Tikhonov rows if needed).
Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper);

// ---------------------------------------------------------------------------
// Axial basis
// ---------------------------------------------------------------------------

class AxialBasis {
  public:
    // Unit-voltage potentials of every control electrode sampled along the
    // line (x0, y0, z) for z on `zgrid`.  y0 should be the rf null height;
    // if it is not a field zero of the rf electrodes, height_verified() is
    // false (transport at that height rides on intrinsic micromotion).
    AxialBasis(PlanarGeometry geometry, Eigen::VectorXd zgrid, double y0,
               double x0 = 0.0);

    const Eigen::VectorXd& zgrid() const { return zgrid_; }
    const Eigen::MatrixXd& samples() const { return samples_; }  // nz x ne
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t electrode_count() const { return labels_.size(); }
    double height() const { return y0_; }
    double pitch() const { return pitch_; }
    bool height_verified() const { return height_verified_; }
    const PlanarGeometry& geometry() const { return geometry_; }

    // Row of m-th z-derivatives of the per-electrode basis at z0, from the
    // 7-point local polynomial fit (V / m^order per volt).
    Eigen::VectorXd derivative_row(int order, double z0) const;

    // Composed axial potential for a voltage vector, evaluated analytically
    // (independent of the grid fit).
    double compose(const Eigen::VectorXd& volts, double z) const;

  private:
    PlanarGeometry geometry_;
    std::vector<std::size_t> electrodes_;  // control electrode indices
    std::vector<std::string> labels_;
    Eigen::VectorXd zgrid_;
    Eigen::MatrixXd samples_;
    double y0_, x0_, pitch_;
    bool height_verified_;
};

// ---------------------------------------------------------------------------
// Well targets and solutions
// ---------------------------------------------------------------------------

struct WellSpec {
    double center = 0.0;   // z0 (m)
    double omega_z = 0.0;  // rad/s, >= 0
    std::optional<double> quartic;  // kappa4 (V/m^4): Phi ~ ... + kappa4 (z-z0)^4
    IonSpecies species = IonSpecies::from_mass(1.0, 1);
};

struct SolveOptions {
    double rails = 10.0;            // +-V limit
    double infeasible_tol = 1e-3;   // relative residual above which to refuse
    bool reject_degenerate = false; // throw instead of ganging duplicates
    double window_halfwidth = 0.0;  // >0: value matching over a window
    int window_points = 9;
};

struct WellSolution {
    Eigen::VectorXd voltages;            // per basis electrode
    double residual = 0.0;               // relative residual of the targets
    std::vector<std::vector<std::size_t>> ganged;  // redundant electrode groups
    // Independent diagnostics (direct minimisation + finite differences):
    double achieved_center = 0.0;        // m
    double achieved_omega_z = 0.0;       // rad/s (0 if curvature <= 0)
    double achieved_curvature = 0.0;     // V/m^2
    double achieved_quartic = 0.0;       // V/m^4 (Taylor coefficient)
};

WellSolution solve_well(const AxialBasis& basis, const WellSpec& spec,
                        const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

struct SequenceStep {
    double time = 0.0;  // s
    Eigen::VectorXd voltages;
    double target_center = 0.0;
    double achieved_center = 0.0;
    double achieved_omega_z = 0.0;
    double achieved_curvature = 0.0;
    double achieved_quartic = 0.0;
    std::vector<double> minima;  // locations of composed-potential minima (m)
    double barrier_ev = 0.0;     // central barrier for double wells
};

struct VoltageSequence {
    std::vector<SequenceStep> steps;
    double max_omega_deviation = 0.0;  // max |achieved/target - 1| over steps
    double step_secular_phase = 0.0;   // step duration * omega_z (radians)
    double total_secular_phase = 0.0;  // duration * omega_z
};

// Constant-curvature transport from z_start to z_end in `steps` solves with
// linearly interpolated centers.  `duration` scales the uniform timestamps.
VoltageSequence transport_sequence(const AxialBasis& basis, const IonSpecies& species,
                                   double omega_z, double z_start, double z_end,
                                   int steps, double duration,
                                   const SolveOptions& opts = {});

// Morph a single well at z0 through the zero-curvature (quartic) point into
// a symmetric double well: curvature ramps c0 -> -c0 at fixed quartic term.
// kappa4 defaults to c0 / pitch^2.
VoltageSequence separation_ramp(const AxialBasis& basis, const IonSpecies& species,
                                double omega_z, double z0, int stages,
                                double duration,
                                std::optional<double> kappa4 = std::nullopt,
                                const SolveOptions& opts = {});

// (step, time, V_1..V_n, z0_achieved, omega_z_achieved)
void write_waveform_csv(std::ostream& os, const VoltageSequence& seq,
                        const std::vector<std::string>& labels);

}  // namespace iontrap

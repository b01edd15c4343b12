// SPDX-License-Identifier: Apache-2.0
//
// pseudo.hpp -- pseudopotential construction on top of the analytic field
// model: rf-null search, secular frequencies and principal axes, trap depth,
// and the degeneracy-lifting analysis driven by static control offsets.
//
// The pseudopotential energy of an ion in an rf field of amplitude E0(r) is
//   U_pp(r) = q^2 |E0(r)|^2 / (4 m Omega_rf^2)     [joules]
// and is reported in eV.  Static control potentials enter the total
// effective energy as q * Phi_static(r).

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "iontrap/core.hpp"
#include "iontrap/surface_fields.hpp"

namespace iontrap {

// Single-phase rf drive: all rf electrodes at `amplitude` volts, in phase.
struct RfDrive {
    double amplitude = 0.0;  // V
    double omega_rf = 0.0;   // rad/s
};

// Ideal linear-quadrupole trap near its axis, distance scale R.
struct QuadrupoleTrapModel {
    double R = 0.0;       // m
    double V0 = 0.0;      // V
    double omega_rf = 0.0;  // rad/s
    IonSpecies species = IonSpecies::from_mass(1.0, 1);
};

// Static potential added to the pseudopotential: per-electrode biases, a
// uniform stray field, an optional analytic quadrupole term, or the
// "intrinsic" configuration (everything except the rf electrodes offset by a
// common voltage).
class StaticPotential {
  public:
    static StaticPotential from_biases(const PlanarGeometry& g, Eigen::VectorXd biases,
                                       const Eigen::Vector3d& uniform_field =
                                           Eigen::Vector3d::Zero());
    static StaticPotential uniform(const Eigen::Vector3d& field);
    // 0.5 * r^T C r with C symmetric traceless (a pure quadrupole).
    static StaticPotential quadrupole(const Eigen::Matrix3d& curvature);
    // All of the grounded plane and control electrodes offset to `offset`
    // volts: Phi = offset * (1 - sum of rf unit potentials).
    static StaticPotential intrinsic_offset(const PlanarGeometry& g, double offset);

    double value(const Eigen::Vector3d& r) const;           // V
    Eigen::Vector3d gradient(const Eigen::Vector3d& r) const;  // V/m
    Eigen::Matrix3d hessian(const Eigen::Vector3d& r) const;   // V/m^2

  private:
    StaticPotential() = default;
    const PlanarGeometry* geometry_ = nullptr;
    Eigen::VectorXd biases_;
    Eigen::Vector3d uniform_field_ = Eigen::Vector3d::Zero();
    Eigen::Matrix3d curvature_ = Eigen::Matrix3d::Zero();
    bool intrinsic_ = false;
    double offset_ = 0.0;
};

class PseudoModel {
  public:
    PseudoModel(PlanarGeometry geometry, RfDrive drive, IonSpecies species);

    const PlanarGeometry& geometry() const { return geometry_; }
    const RfDrive& drive() const { return drive_; }
    const IonSpecies& species() const { return species_; }
    double length_scale() const { return scale_; }
    // Span of the rf electrodes' finite coordinates (null-search scale).
    double rf_length_scale() const { return rf_scale_; }
    double rf_center_x() const { return rf_center_x_; }

    // Amplitude vector of the oscillating field (V/m).
    Eigen::Vector3d rf_field(const Eigen::Vector3d& r) const;
    // Jacobian dE_i/dx_j of the amplitude field (V/m^2).
    Eigen::Matrix3d rf_field_jacobian(const Eigen::Vector3d& r) const;

    double potential_ev(const Eigen::Vector3d& r) const;
    double energy(const Eigen::Vector3d& r) const;  // J
    Eigen::Vector3d energy_gradient(const Eigen::Vector3d& r) const;   // J/m
    Eigen::Matrix3d energy_hessian(const Eigen::Vector3d& r) const;    // J/m^2

    // Total effective energy including an optional static potential.
    double total_energy(const Eigen::Vector3d& r, const StaticPotential* s) const;
    Eigen::Vector3d total_gradient(const Eigen::Vector3d& r, const StaticPotential* s) const;
    Eigen::Matrix3d total_hessian(const Eigen::Vector3d& r, const StaticPotential* s) const;

  private:
    PlanarGeometry geometry_;
    RfDrive drive_;
    IonSpecies species_;
    double scale_;
    double rf_scale_;
    double rf_center_x_;
    double energy_factor_;  // q^2/(4 m Omega^2)
    std::vector<std::size_t> rf_;
};

// ---------------------------------------------------------------------------
// Mode analysis
// ---------------------------------------------------------------------------

struct ModeSolution {
    Eigen::Vector3d equilibrium = Eigen::Vector3d::Zero();
    std::vector<double> frequencies;  // rad/s, ascending
    Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();  // columns match frequencies
    std::vector<bool> degenerate;   // member of a degenerate pair
    std::vector<bool> unconfined;   // zero-frequency (translationally free)
    std::vector<double> angle_to_normal;  // per mode, radians in [0, pi/2]
    // Rotation of the most-vertical confined radial axis away from the
    // surface normal.
    double axis_rotation = 0.0;
};

struct TrapDepthResult {
    Eigen::Vector3d saddle = Eigen::Vector3d::Zero();
    double depth_ev = 0.0;
    Eigen::Vector3d escape_direction = Eigen::Vector3d::Zero();
    Eigen::Vector3d search_box_lo = Eigen::Vector3d::Zero();
    Eigen::Vector3d search_box_hi = Eigen::Vector3d::Zero();
};

struct CoolingReport {
    Eigen::Vector3d beam = Eigen::Vector3d::Zero();
    std::vector<double> overlaps;        // |axis . beam|
    std::vector<bool> low_overlap;       // overlap below threshold
    std::vector<bool> degenerate_risk;   // axis direction indeterminate
    bool ok = true;
};

struct NullSearchOptions {
    double field_tolerance = 0.0;  // V/m; 0 -> 1e-9 * amplitude / length_scale
    int max_iterations = 100;
};

struct DepthSearchOptions {
    double box_factor = 5.0;   // search box half-size in units of null height
    int ray_count = 72;        // directions for the asymmetric fallback
    int ray_samples = 400;
};

// Newton search for a zero of the rf field amplitude, starting from `guess`.
Eigen::Vector3d find_rf_null(const PseudoModel& model, const Eigen::Vector3d& guess,
                             const NullSearchOptions& opts = {});

// Coarse-grid heuristic starting point for find_rf_null.
Eigen::Vector3d default_null_guess(const PseudoModel& model);

// Newton minimisation of the total effective energy (rf + static).
Eigen::Vector3d find_equilibrium(const PseudoModel& model, const StaticPotential& s,
                                 const Eigen::Vector3d& guess);

// Eigen-decomposition of the total-energy Hessian at an equilibrium point.
ModeSolution secular_modes(const PseudoModel& model, const Eigen::Vector3d& equilibrium,
                           const StaticPotential* statics = nullptr);

// omega_r = q V0 / (sqrt(2) m Omega R^2).
double quadrupole_radial_frequency(const QuadrupoleTrapModel& model);

// Lowest escape saddle of the pseudopotential above the null.
TrapDepthResult trap_depth(const PseudoModel& model, const Eigen::Vector3d& null,
                           const DepthSearchOptions& opts = {});

// Modes with every non-rf surface offset by a common control voltage.
ModeSolution intrinsic_axes(const PseudoModel& model, double control_offset);

// Beam-direction overlap with each principal axis.
CoolingReport cooling_geometry_check(const ModeSolution& modes,
                                     const Eigen::Vector3d& beam_direction,
                                     double overlap_threshold = 0.05);

// ---------------------------------------------------------------------------
// Grid export: comma-separated (x, y, z, pseudopotential_eV, annotation).
// ---------------------------------------------------------------------------

struct GridSpec {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
    int nx = 1, ny = 1;
    double z = 0.0;
};

struct GridAnnotation {
    Eigen::Vector3d point;
    std::string tag;
};

void write_pseudopotential_grid(std::ostream& os, const PseudoModel& model,
                                const GridSpec& spec,
                                const std::vector<GridAnnotation>& annotations = {});

}  // namespace iontrap

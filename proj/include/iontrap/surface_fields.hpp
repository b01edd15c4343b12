// SPDX-License-Identifier: Apache-2.0
//
// surface_fields.hpp -- analytic electrostatics for electrodes embedded in an
// infinite grounded plane at y = 0, with the trapping half-space at y > 0.
//
// Two electrode shapes are supported:
//   * infinite strips along z, with closed-form potential, field and second
//     derivatives (all orders come from a complex potential);
//   * axis-aligned rectangular patches, with closed-form potential (solid
//     angle) and field (line integral around the perimeter).
//
// Gaps between electrodes are not modelled: anything not covered by an
// electrode is grounded plane.  Evaluation at y <= 0 is an error because the
// boundary data is discontinuous across electrode edges.

#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iontrap/core.hpp"

namespace iontrap {

enum class ElectrodeRole { rf, control };

// Infinite strip a < x < b in the grounded plane.  One (not both) of the
// edges may be -inf / +inf; semi-infinite strips use dedicated formula
// branches instead of a large finite edge.
struct Strip {
    double a = 0.0;  // lower x edge (m), may be -infinity
    double b = 0.0;  // upper x edge (m), may be +infinity
    ElectrodeRole role = ElectrodeRole::control;
    double bias = 0.0;      // volts; rf strips are externally driven
    double rf_phase = 0.0;  // radians, in [0, 2*pi)
    std::string label;
};

// Axis-aligned rectangle [x0,x1] x [z0,z1] in the plane.
struct RectPatch {
    double x0 = 0.0, x1 = 0.0;  // m
    double z0 = 0.0, z1 = 0.0;  // m
    ElectrodeRole role = ElectrodeRole::control;
    double bias = 0.0;
    double rf_phase = 0.0;
    std::string label;
};

// ---------------------------------------------------------------------------
// Single-electrode solutions (per applied volt unless stated otherwise).
// ---------------------------------------------------------------------------

// Potential of a biased strip at (x, y), y > 0.  Uses the strip's bias.
double strip_potential(const Strip& strip, double x, double y);

// In-plane field (Ex, Ey) in V/m; analytic, no numerical differentiation.
Eigen::Vector2d strip_field(const Strip& strip, double x, double y);

// Second derivatives of the potential, d2(phi)/dxi dxj in V/m^2.
// Symmetric and traceless (2D Laplace).
Eigen::Matrix2d strip_hessian(const Strip& strip, double x, double y);

// Derivatives of the complex potential F(w), w = x + i y, per unit bias.
// phi = Im F, so:
//   d(phi)/dx = Im F',   d(phi)/dy  = Re F'
//   phi_xx = Im F'',     phi_xy = Re F'',   phi_yy = -Im F''
//   phi_xxx = Im F''',   phi_xxy = Re F''', phi_xyy = -Im F''', phi_yyy = -Re F'''
struct StripComplexDerivs {
    std::complex<double> d1, d2, d3;
};
StripComplexDerivs strip_complex_derivs(const Strip& strip, double x, double y);

// Potential of a biased rectangular patch at r = (x, y, z), y > 0:
// bias * (solid angle subtended by the rectangle) / (2*pi).
double rect_patch_potential(const RectPatch& patch, const Eigen::Vector3d& r);

// Field of the patch in V/m, from the closed-form perimeter line integral.
Eigen::Vector3d rect_patch_field(const RectPatch& patch, const Eigen::Vector3d& r);

// Second derivatives of the patch potential (Richardson-extrapolated central
// differences of the analytic field).
Eigen::Matrix3d rect_patch_hessian(const RectPatch& patch, const Eigen::Vector3d& r);

// ---------------------------------------------------------------------------
// Geometry: a set of non-overlapping strips and patches.
// Electrode indexing is strips first (in insertion order), then patches.
// ---------------------------------------------------------------------------

class PlanarGeometry {
  public:
    void add_strip(Strip s);
    void add_patch(RectPatch p);

    const std::vector<Strip>& strips() const { return strips_; }
    const std::vector<RectPatch>& patches() const { return patches_; }

    std::size_t electrode_count() const { return strips_.size() + patches_.size(); }
    bool has_patches() const { return !patches_.empty(); }

    std::vector<std::string> labels() const;
    std::vector<std::size_t> rf_indices() const;
    std::vector<std::size_t> control_indices() const;
    ElectrodeRole role_of(std::size_t e) const;
    const std::string& label_of(std::size_t e) const;
    double rf_phase_of(std::size_t e) const;
    double bias_of(std::size_t e) const;

    // Characteristic length: span of the finite electrode coordinates.
    double length_scale() const;

    PlanarGeometry translated(double dx, double dz = 0.0) const;

    // Per-electrode solutions at unit bias.
    double unit_potential(std::size_t e, const Eigen::Vector3d& r) const;
    Eigen::Vector3d unit_field(std::size_t e, const Eigen::Vector3d& r) const;
    Eigen::Matrix3d unit_hessian(std::size_t e, const Eigen::Vector3d& r) const;

  private:
    std::vector<Strip> strips_;
    std::vector<RectPatch> patches_;
};

// Superposition with an explicit bias vector (length = electrode_count);
// the per-electrode stored biases are ignored here.
double geometry_potential(const PlanarGeometry& g, const Eigen::VectorXd& biases,
                          const Eigen::Vector3d& r);
Eigen::Vector3d geometry_field(const PlanarGeometry& g, const Eigen::VectorXd& biases,
                               const Eigen::Vector3d& r);

// Canonical surface-electrode geometries.  four_wire(d): rf strips (-d, 0)
// and (d, +inf); five_wire(d): rf strips (-3d/2, -d/2) and (d/2, 3d/2).
PlanarGeometry four_wire(double d);
PlanarGeometry five_wire(double d);

}  // namespace iontrap

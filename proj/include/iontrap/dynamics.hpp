// SPDX-License-Identifier: Apache-2.0
//
// dynamics.hpp -- full time-dependent integration of the ion motion
// m x'' = q E(x, t), used to validate the pseudopotential picture, quantify
// micromotion, and simulate rf phase imbalance.  Also the closed-form excess
// micromotion relations and the frequency-modulation sideband spectrum.

#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "iontrap/core.hpp"
#include "iontrap/surface_fields.hpp"

namespace iontrap {

// ---------------------------------------------------------------------------
// Field sources
// ---------------------------------------------------------------------------

class FieldSource {
  public:
    virtual ~FieldSource() = default;
    virtual Eigen::Vector3d field(const Eigen::Vector3d& r, double t) const = 0;  // V/m
    virtual double omega_rf() const = 0;  // rad/s
    virtual bool in_domain(const Eigen::Vector3d&) const { return true; }
};

// E(t) = E0 cos(Omega t + phase) + E_static, spatially uniform.
class UniformOscillatingField final : public FieldSource {
  public:
    UniformOscillatingField(const Eigen::Vector3d& amplitude, double omega,
                            double phase = 0.0,
                            const Eigen::Vector3d& static_field = Eigen::Vector3d::Zero());
    Eigen::Vector3d field(const Eigen::Vector3d& r, double t) const override;
    double omega_rf() const override { return omega_; }

  private:
    Eigen::Vector3d amplitude_;
    double omega_;
    double phase_;
    Eigen::Vector3d static_;
};

// Ideal linear-quadrupole drive near the trap axis,
//   Phi = (V0/2) cos(Omega t) (1 + (x^2 - y^2)/R^2),
// decomposed into the two rf rods so that a phase difference between them
// can be simulated.  Each rod contributes
//   Phi_e = (V0/2) cos(Omega t + phase_e) (1/2 +- w x/R + (x^2 - y^2)/(2 R^2)),
// where w is the near-axis dipole weight of a single rod (a geometry factor
// of order unity; the dipole terms cancel for equal phases).
class QuadrupoleDrive final : public FieldSource {
  public:
    QuadrupoleDrive(double v0, double r_scale, double omega, double phase_a = 0.0,
                    double phase_b = 0.0, double dipole_weight = 0.25,
                    const Eigen::Vector3d& static_field = Eigen::Vector3d::Zero());
    Eigen::Vector3d field(const Eigen::Vector3d& r, double t) const override;
    double omega_rf() const override { return omega_; }
    bool in_domain(const Eigen::Vector3d& r) const override;

  private:
    double v0_, r2_, r_, omega_, phase_a_, phase_b_, dipole_;
    Eigen::Vector3d static_;
};

// Per-electrode drive for a planar geometry.
struct DriveConfig {
    double omega_rf = 0.0;            // rad/s, common to all rf electrodes
    Eigen::VectorXd rf_amplitudes;    // V, one per rf electrode (geometry order)
    Eigen::VectorXd rf_phases;        // rad, same length; normalised to (-pi, pi]
    Eigen::VectorXd control_biases;   // V, one per control electrode
    Eigen::Vector3d stray_field = Eigen::Vector3d::Zero();  // E_dc, V/m

    // All rf electrodes at `amplitude`, phases and control biases taken from
    // the geometry's stored per-electrode values.
    static DriveConfig from_geometry(const PlanarGeometry& g, double amplitude,
                                     double omega_rf);
};

class PlanarDrive final : public FieldSource {
  public:
    PlanarDrive(PlanarGeometry geometry, DriveConfig drive);
    Eigen::Vector3d field(const Eigen::Vector3d& r, double t) const override;
    double omega_rf() const override { return drive_.omega_rf; }
    bool in_domain(const Eigen::Vector3d& r) const override { return r.y() > 0.0; }
    const PlanarGeometry& geometry() const { return geometry_; }
    const DriveConfig& drive() const { return drive_; }

  private:
    PlanarGeometry geometry_;
    DriveConfig drive_;
};

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<double> times;                 // s, uniform spacing
    std::vector<Eigen::Vector3d> positions;    // m
    std::vector<Eigen::Vector3d> velocities;   // m/s
    double dt = 0.0;
    double samples_per_cycle = 0.0;
    double omega_rf = 0.0;                     // rad/s of the drive
    std::optional<double> escape_time;         // set if the ion left the domain
    bool escaped() const { return escape_time.has_value(); }
};

struct IntegrateOptions {
    int steps_per_cycle = 128;  // clamped to >= 100
    bool allow_short_run = false;  // waive the 10-cycle minimum (for tooling)
};

// Fixed-step RK4 integration of m x'' = q E(x, t) from t = 0.  A negative
// duration integrates backwards in time.  Requires |duration| >= 10 rf
// cycles unless allow_short_run is set.
Trajectory integrate(const FieldSource& source, const IonSpecies& species,
                     const Eigen::Vector3d& x0, const Eigen::Vector3d& v0,
                     double duration, const IntegrateOptions& opts = {});

// ---------------------------------------------------------------------------
// Spectral analysis
// ---------------------------------------------------------------------------

struct SpectralSummary {
    std::vector<double> frequencies;       // rad/s, periodogram bins
    std::vector<double> power;             // m^2 per bin, summed over axes
    std::vector<double> secular_frequencies;  // rad/s, peaks below omega_rf/2
    double dominant_frequency = 0.0;       // rad/s, strongest line overall
    double micromotion_amplitude = 0.0;    // m, |X(omega_rf)|
    Eigen::Vector3cd micromotion_phasor = Eigen::Vector3cd::Zero();
};

// Hann-windowed periodogram with parabolic peak interpolation; the
// micromotion amplitude is read by demodulation at the drive frequency.
// Requires >= 50 secular cycles to report a secular frequency.
SpectralSummary spectral_decompose(const Trajectory& traj);

// Complex amplitude per axis of x(t) = Re[X exp(i omega t)] at a given
// frequency (Hann-weighted demodulation).
Eigen::Vector3cd demodulate(const Trajectory& traj, double omega);

// ---------------------------------------------------------------------------
// Micromotion relations
// ---------------------------------------------------------------------------

struct MicromotionReport {
    double secular_position = 0.0;      // x_s (m)
    double displacement = 0.0;          // x_d (m)
    double micromotion_amplitude = 0.0; // x_um (m)
    std::optional<double> modulation = {};  // beta, if lambda/theta were given
};

// Closed-form displacement and excess micromotion for a uniform static field:
// x_d = q E_dc / (m w_r^2),  x_um = sqrt(2) (w_r / W_rf) x_d.
MicromotionReport excess_micromotion(double e_dc, double omega_r, double omega_rf,
                                     const IonSpecies& species);
MicromotionReport excess_micromotion(double e_dc, double omega_r, double omega_rf,
                                     const IonSpecies& species, double lambda,
                                     double theta);

// beta = 2 pi x_um cos(theta) / lambda.
double modulation_index(double x_um, double lambda, double theta);

// Relative intensity J_n(beta)^2 of the n-th micromotion sideband.
struct SidebandLine {
    int order;         // signed harmonic of the drive frequency
    double intensity;  // relative to total = 1
};
std::vector<SidebandLine> sideband_spectrum(double beta);

// Small-beta on-resonance fluorescence loss, beta^2/2; valid for beta < 1.
double fractional_fluorescence_loss(double beta);

// ---------------------------------------------------------------------------
// rf phase imbalance
// ---------------------------------------------------------------------------

struct PhaseImbalanceResult {
    Eigen::Vector3d null_point = Eigen::Vector3d::Zero();
    double micromotion_amplitude = 0.0;  // m, residual at the null
    double beta = 0.0;                   // for the given lambda, theta
};

// Integrates the full motion of an ion parked at the (balanced-drive)
// pseudopotential minimum and reports the residual micromotion and the
// resulting modulation index.
PhaseImbalanceResult phase_imbalance_micromotion(const PlanarGeometry& geometry,
                                                 const DriveConfig& drive,
                                                 const IonSpecies& species,
                                                 double lambda, double theta,
                                                 int cycles = 256);
PhaseImbalanceResult phase_imbalance_micromotion(const QuadrupoleDrive& drive,
                                                 const IonSpecies& species,
                                                 double lambda, double theta,
                                                 int cycles = 256);

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

// (t, x, y, z, vx, vy, vz) in SI.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
// (frequency_Hz, amplitude_m): sqrt of per-bin power.
void write_spectrum_csv(std::ostream& os, const SpectralSummary& spectrum);

}  // namespace iontrap

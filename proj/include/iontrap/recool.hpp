// SPDX-License-Identifier: Apache-2.0
//
// recool.hpp -- one-dimensional semiclassical Doppler recooling thermometry
// in the weak-binding limit (omega_z << Gamma): simulate the time-resolved
// fluorescence of an initially hot ion under a cooling laser, and fit the
// initial temperature as the single free physical parameter.
//
// Per time step the two-level scattering rate is averaged over one phase of
// the harmonic oscillation at fixed amplitude; the energy then evolves by
// the phase-averaged cooling power plus the recoil heating term
// hbar^2 k^2 Rbar / m.  Ensemble averages over the Maxwell-Boltzmann initial
// energy distribution use Gauss-Laguerre quadrature, so fits are
// deterministic.

#pragma once

#include <iosfwd>
#include <vector>

#include "iontrap/core.hpp"

namespace iontrap {

struct LaserParams {
    double gamma = 0.0;      // linewidth (rad/s)
    double k = 0.0;          // wavevector magnitude (1/m)
    double detuning = 0.0;   // rad/s (negative = red)
    double s0 = 0.0;         // saturation parameter
    double cos_theta = 1.0;  // projection of the beam on the hot mode, (0, 1]
};

// Two-level rate (Gamma/2) s0 / (1 + s0 + (2 (delta - k v cos_theta)/Gamma)^2).
double scattering_rate(double v, const LaserParams& laser);

struct RecoolCurve {
    std::vector<double> times;    // bin centres (s), uniform
    std::vector<double> rates;    // fluorescence rate per bin (photons/s)
    std::vector<double> weights;  // least-squares weights (1/sigma^2)
};

struct RecoolOptions {
    int bins = 200;
    int substeps = 4;       // integrator steps per bin
    int phase_points = 64;  // oscillation-phase average
};

struct RecoolSim {
    RecoolCurve curve;
    std::vector<double> energies;  // J, at bin centres
    double steady_rate = 0.0;      // photons/s of a cold ion
    bool reached_steady = false;
    bool weak_binding_ok = true;   // omega_z < Gamma / 10
};

// Forward simulation from a single initial oscillation energy (J).
// Refuses detuning >= 0 (a blue laser heats).
RecoolSim simulate_recooling(double initial_energy, double omega_z,
                             const IonSpecies& species, const LaserParams& laser,
                             double duration, const RecoolOptions& opts = {});

// Energy at which phase-averaged cooling balances recoil heating.
double doppler_equilibrium_energy(const LaserParams& laser, const IonSpecies& species);

// True when the hot mode is well separated from the others (1D model valid).
bool heating_is_one_dimensional(double omega_hot, double omega_2, double omega_3);

struct TemperatureFit {
    double temperature = 0.0;  // K
    double ci_low = 0.0;       // 1-sigma interval
    double ci_high = 0.0;
    bool low_sensitivity = false;
    double chi2 = 0.0;
};

struct FitOptions {
    double t_min = 0.0;  // K; 0 -> Doppler limit / 30
    double t_max = 0.0;  // K; 0 -> Doppler limit * 3000
    int laguerre_order = 8;
    RecoolOptions forward;
};

// Weighted least-squares fit of the ensemble-averaged forward model over the
// initial temperature.  The curve and the model are both normalised to their
// late-time rate, so the temperature is the only free parameter.
TemperatureFit fit_temperature(const RecoolCurve& curve, double omega_z,
                               const IonSpecies& species, const LaserParams& laser,
                               const FitOptions& opts = {});

// Ensemble-averaged model curve at temperature T (exposed for tooling).
RecoolCurve model_curve(double temperature, double omega_z, const IonSpecies& species,
                        const LaserParams& laser, double duration,
                        const FitOptions& opts = {});

// CSV ingestion: header then rows (t_seconds, counts, bin_width).
RecoolCurve read_recool_curve(std::istream& is);

}  // namespace iontrap

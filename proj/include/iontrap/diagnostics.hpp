// SPDX-License-Identifier: Apache-2.0
//
// diagnostics.hpp -- design-rule estimators: stray fields from exposed
// dielectric between thick electrodes, the anomalous-heating spectral
// density scaling, and the Johnson-noise comparison.

#pragma once

#include <numbers>
#include <string>

#include "iontrap/core.hpp"

namespace iontrap {

// Exposed strip of substrate of width a, charged to V_s, between electrodes
// of thickness t, with the ion at distance R.  Valid for R >> a, and only
// the endpoints t = 0 and t >= a/pi of the thickness range are defined.
struct DielectricGap {
    double gap_width = 0.0;        // a (m)
    double thickness = 0.0;        // t (m)
    double strip_potential = 0.0;  // V_s (V)
    double ion_distance = 0.0;     // R (m)

    bool far_field_valid() const { return ion_distance >= 10.0 * gap_width; }
    bool thickness_supported() const {
        return thickness == 0.0 || thickness >= gap_width / std::numbers::pi;
    }
};

// |E| at the ion: a V_s / (pi R^2) for t = 0, suppressed by (4/pi) e^{-pi t/a}
// for t >= a/pi.  Thicknesses in between are refused.
double stray_field(const DielectricGap& gap, bool allow_out_of_validity = false);

// S_E(R, w) = S_E0 (R/R0)^-alpha (w/w0)^-beta_h.
struct HeatingModel {
    double s_e0 = 0.0;    // (V/m)^2 / Hz at the anchor
    double r0 = 0.0;      // m
    double omega0 = 0.0;  // rad/s
    double alpha = 3.5;   // distance exponent
    double beta_h = 1.0;  // frequency exponent (typical range 0.8 to 1.4)
};

double heating_spectral_density(const HeatingModel& model, double r, double omega);

// Motional heating rate of a fluctuating-field-driven oscillator,
// q^2 S_E / (4 m hbar w), in quanta per second.
double heating_rate(double s_e, const IonSpecies& species, double omega);

// Johnson-noise distance scaling: (r1/r2)^-2.
double johnson_comparison(double r1, double r2);

// ---------------------------------------------------------------------------
// Design report
// ---------------------------------------------------------------------------

struct DesignReportInputs {
    std::string geometry_summary;
    double null_height_um = 0.0;
    double secular_frequency_mhz = 0.0;
    double depth_mev = 0.0;
    double stray_field_v_m = -1.0;     // negative -> omitted
    double heating_rate_quanta_s = -1.0;  // negative -> omitted
    double heating_r_um = 0.0;
};

std::string render_design_report(const DesignReportInputs& inputs);

}  // namespace iontrap

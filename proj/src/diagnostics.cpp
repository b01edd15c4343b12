// SPDX-License-Identifier: Apache-2.0

#include "iontrap/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace iontrap {

double stray_field(const DielectricGap& gap, bool allow_out_of_validity) {
    if (!(gap.gap_width > 0.0)) throw ValidationError("gap width must be positive");
    if (!(gap.ion_distance > 0.0))
        throw ValidationError("ion distance must be positive");
    if (gap.thickness < 0.0) throw ValidationError("thickness must be >= 0");
    if (!gap.thickness_supported())
        throw UnsupportedRegimeError(
            "no expression for 0 < t < a/pi; use t = 0 or t >= a/pi (a/pi = " +
            std::to_string(gap.gap_width / std::numbers::pi) + " m)");
    if (!gap.far_field_valid() && !allow_out_of_validity)
        throw UnsupportedRegimeError(
            "model assumes R >> a; pass allow_out_of_validity to override");

    const double base = gap.gap_width * gap.strip_potential /
                        (std::numbers::pi * gap.ion_distance * gap.ion_distance);
    if (gap.thickness == 0.0) return std::abs(base);
    const double suppression =
        (4.0 / std::numbers::pi) *
        std::exp(-std::numbers::pi * gap.thickness / gap.gap_width);
    return std::abs(base) * suppression;
}

double heating_spectral_density(const HeatingModel& model, double r, double omega) {
    if (!(model.s_e0 > 0.0) || !(model.r0 > 0.0) || !(model.omega0 > 0.0))
        throw ValidationError("heating model anchor must be positive");
    if (!(model.alpha > 0.0) || !(model.beta_h > 0.0))
        throw ValidationError("heating exponents must be positive");
    if (!(r > 0.0) || !(omega > 0.0))
        throw ValidationError("distance and frequency must be positive");
    return model.s_e0 * std::pow(r / model.r0, -model.alpha) *
           std::pow(omega / model.omega0, -model.beta_h);
}

double heating_rate(double s_e, const IonSpecies& species, double omega) {
    if (!(s_e >= 0.0)) throw ValidationError("spectral density must be >= 0");
    if (!(omega > 0.0)) throw ValidationError("frequency must be positive");
    const double q = species.charge_coulomb();
    return q * q * s_e / (4.0 * species.mass_kg() * constants::hbar * omega);
}

double johnson_comparison(double r1, double r2) {
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw ValidationError("distances must be positive");
    return std::pow(r1 / r2, -2.0);
}

std::string render_design_report(const DesignReportInputs& in) {
    std::ostringstream os;
    os.precision(6);
    os << "design report\n"
       << "  geometry:           " << in.geometry_summary << '\n'
       << "  null height:        " << in.null_height_um << " um\n"
       << "  secular frequency:  " << in.secular_frequency_mhz << " MHz\n"
       << "  trap depth:         " << in.depth_mev << " meV\n";
    if (in.stray_field_v_m >= 0.0)
        os << "  stray field:        " << in.stray_field_v_m << " V/m\n";
    if (in.heating_rate_quanta_s >= 0.0)
        os << "  heating rate:       " << in.heating_rate_quanta_s
           << " quanta/s at R = " << in.heating_r_um << " um\n";
    return os.str();
}

}  // namespace iontrap

// SPDX-License-Identifier: Apache-2.0

#include "iontrap/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "iontrap/core.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/diagnostics.hpp"
#include "iontrap/dynamics.hpp"
#include "iontrap/geometry_io.hpp"
#include "iontrap/pseudo.hpp"
#include "iontrap/recool.hpp"
#include "iontrap/surface_fields.hpp"
#include "iontrap/waveform.hpp"

namespace iontrap {

namespace {

using nlohmann::json;

constexpr double um = 1e-6;
constexpr double nm = 1e-9;

double mhz_to_angular(double mhz) { return angular_from_hz(mhz * 1e6); }
double angular_to_mhz(double w) { return hz_from_angular(w) / 1e6; }

Eigen::Vector3d parse_vec3(const std::string& s, const std::string& what) {
    Eigen::Vector3d v;
    std::istringstream ss(s);
    std::string tok;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, tok, ','))
            throw ValidationError(what + " must be three comma-separated numbers");
        try {
            v[i] = std::stod(tok);
        } catch (const std::exception&) {
            throw ValidationError(what + ": bad number '" + tok + "'");
        }
    }
    return v;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_text_file_atomic(path, content);
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string geometry_path;
    std::string species = "24Mg+";
    double rf_voltage = 0.0;
    double rf_freq_mhz = 0.0;
    std::string beam = "1,0,1";
    std::string stray;  // "Ex,Ey,Ez" in V/m
    double wavelength_nm = 0.0;
    double beam_angle_deg = 0.0;
    double gap_width_um = 0.0;
    double gap_thickness_um = 0.0;
    double gap_potential_v = 1.0;
    std::string format = "text";
    std::string output = "-";
};

std::string render_analyze_text(const json& j) {
    std::ostringstream os;
    os.precision(6);
    os << "trap analysis\n";
    os << "  geometry:        " << j["geometry"]["strips"].get<int>() << " strip(s), "
       << j["geometry"]["patches"].get<int>() << " patch(es)\n";
    os << "  species:         " << j["species"].get<std::string>() << "\n";
    os << "  rf drive:        " << j["drive"]["rf_voltage_V"].get<double>() << " V at "
       << j["drive"]["rf_frequency_MHz"].get<double>() << " MHz\n";
    const auto& nl = j["null_um"];
    os << "  rf null (um):    (" << nl[0].get<double>() << ", " << nl[1].get<double>()
       << ", " << nl[2].get<double>() << ")\n";
    if (j.contains("equilibrium_um")) {
        const auto& eq = j["equilibrium_um"];
        os << "  equilibrium (um): (" << eq[0].get<double>() << ", "
           << eq[1].get<double>() << ", " << eq[2].get<double>() << ")\n";
    }
    os << "  modes:\n";
    for (const auto& m : j["modes"]) {
        os << "    " << m["frequency_MHz"].get<double>() << " MHz, axis ("
           << m["axis"][0].get<double>() << ", " << m["axis"][1].get<double>() << ", "
           << m["axis"][2].get<double>() << "), angle to normal "
           << m["angle_to_normal_deg"].get<double>() << " deg";
        if (m["degenerate"].get<bool>()) os << " [degenerate]";
        if (m["unconfined"].get<bool>()) os << " [unconfined]";
        os << "\n";
    }
    os << "  axis rotation:   " << j["axis_rotation_deg"].get<double>() << " deg\n";
    if (j.contains("depth")) {
        os << "  trap depth:      " << j["depth"]["depth_meV"].get<double>()
           << " meV at saddle (" << j["depth"]["saddle_um"][0].get<double>() << ", "
           << j["depth"]["saddle_um"][1].get<double>() << ", "
           << j["depth"]["saddle_um"][2].get<double>() << ") um\n";
    }
    const auto& cool = j["cooling"];
    os << "  cooling beam:    (" << cool["beam"][0].get<double>() << ", "
       << cool["beam"][1].get<double>() << ", " << cool["beam"][2].get<double>()
       << "), overlaps";
    for (const auto& o : cool["overlaps"]) os << ' ' << o.get<double>();
    os << (cool["ok"].get<bool>() ? " [ok]" : " [check]") << "\n";
    for (const auto& w : j["warnings"])
        os << "  warning: " << w.get<std::string>() << "\n";
    if (j.contains("micromotion")) {
        const auto& mm = j["micromotion"];
        os << "  excess micromotion: E_dc = " << mm["e_dc_V_m"].get<double>()
           << " V/m -> x_d = " << mm["displacement_nm"].get<double>()
           << " nm, x_um = " << mm["amplitude_nm"].get<double>() << " nm";
        if (mm.contains("beta")) os << ", beta = " << mm["beta"].get<double>();
        os << "\n";
    }
    if (j.contains("stray_field_V_m"))
        os << "  dielectric stray field: " << j["stray_field_V_m"].get<double>()
           << " V/m\n";
    if (j.contains("design_report")) os << j["design_report"].get<std::string>();
    return os.str();
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    const PlanarGeometry geometry = read_geometry_file(a.geometry_path);
    const IonSpecies species = IonSpecies::from_label(a.species);
    const RfDrive drive{a.rf_voltage, mhz_to_angular(a.rf_freq_mhz)};
    PseudoModel model(geometry, drive, species);

    const Eigen::Vector3d null = find_rf_null(model, default_null_guess(model));

    // Static potential from stored control biases plus any stray field.
    Eigen::VectorXd biases = Eigen::VectorXd::Zero(
        static_cast<Eigen::Index>(geometry.electrode_count()));
    bool any_bias = false;
    for (std::size_t e = 0; e < geometry.electrode_count(); ++e) {
        if (geometry.role_of(e) == ElectrodeRole::control &&
            geometry.bias_of(e) != 0.0) {
            biases[static_cast<Eigen::Index>(e)] = geometry.bias_of(e);
            any_bias = true;
        }
    }
    Eigen::Vector3d stray = Eigen::Vector3d::Zero();
    if (!a.stray.empty()) stray = parse_vec3(a.stray, "--stray-field");
    const bool has_statics = any_bias || stray.norm() > 0.0;

    std::optional<StaticPotential> statics;
    Eigen::Vector3d equilibrium = null;
    if (has_statics) {
        statics = StaticPotential::from_biases(geometry, biases, stray);
        equilibrium = find_equilibrium(model, *statics, null);
    }
    const ModeSolution modes =
        secular_modes(model, equilibrium, statics ? &*statics : nullptr);
    const TrapDepthResult depth = trap_depth(model, null);

    Eigen::Vector3d beam = parse_vec3(a.beam, "--beam");
    beam.normalize();
    const CoolingReport cooling = cooling_geometry_check(modes, beam);

    json j;
    j["geometry"] = {{"strips", static_cast<int>(geometry.strips().size())},
                     {"patches", static_cast<int>(geometry.patches().size())}};
    j["species"] = species.label();
    j["drive"] = {{"rf_voltage_V", a.rf_voltage},
                  {"rf_frequency_MHz", a.rf_freq_mhz}};
    j["null_um"] = vec3_json(null / um);
    if (has_statics) j["equilibrium_um"] = vec3_json(equilibrium / um);
    j["modes"] = json::array();
    for (std::size_t i = 0; i < modes.frequencies.size(); ++i) {
        j["modes"].push_back(
            {{"frequency_MHz", angular_to_mhz(modes.frequencies[i])},
             {"axis", vec3_json(modes.axes.col(static_cast<int>(i)))},
             {"degenerate", static_cast<bool>(modes.degenerate[i])},
             {"unconfined", static_cast<bool>(modes.unconfined[i])},
             {"angle_to_normal_deg", modes.angle_to_normal[i] * 180.0 / std::numbers::pi}});
    }
    j["axis_rotation_deg"] = modes.axis_rotation * 180.0 / std::numbers::pi;
    j["depth"] = {{"depth_meV", depth.depth_ev * 1e3},
                  {"saddle_um", vec3_json(depth.saddle / um)}};
    j["cooling"] = {{"beam", vec3_json(cooling.beam)},
                    {"overlaps", cooling.overlaps},
                    {"low_overlap", cooling.low_overlap},
                    {"degenerate_risk", cooling.degenerate_risk},
                    {"ok", cooling.ok}};
    j["warnings"] = json::array();
    for (std::size_t i = 0; i < cooling.degenerate_risk.size(); ++i) {
        if (cooling.degenerate_risk[i]) {
            j["warnings"].push_back(
                "degenerate radial modes: axes indeterminate, one direction may "
                "not be cooled");
            break;
        }
    }
    for (std::size_t i = 0; i < cooling.low_overlap.size(); ++i)
        if (cooling.low_overlap[i])
            j["warnings"].push_back("mode " + std::to_string(i) +
                                    " nearly perpendicular to the beam");

    // Lowest confined mode frequency, for the micromotion estimate.
    double omega_low = 0.0;
    for (std::size_t i = 0; i < modes.frequencies.size(); ++i) {
        if (!modes.unconfined[i]) {
            omega_low = modes.frequencies[i];
            break;
        }
    }
    if (stray.norm() > 0.0 && omega_low > 0.0) {
        json mm;
        mm["e_dc_V_m"] = stray.norm();
        if (a.wavelength_nm > 0.0) {
            const MicromotionReport rep = excess_micromotion(
                stray.norm(), omega_low, drive.omega_rf, species,
                a.wavelength_nm * nm, a.beam_angle_deg * std::numbers::pi / 180.0);
            mm["displacement_nm"] = rep.displacement / nm;
            mm["amplitude_nm"] = rep.micromotion_amplitude / nm;
            mm["beta"] = *rep.modulation;
        } else {
            const MicromotionReport rep =
                excess_micromotion(stray.norm(), omega_low, drive.omega_rf, species);
            mm["displacement_nm"] = rep.displacement / nm;
            mm["amplitude_nm"] = rep.micromotion_amplitude / nm;
        }
        j["micromotion"] = mm;
    }

    if (a.gap_width_um > 0.0) {
        DielectricGap gap{a.gap_width_um * um, a.gap_thickness_um * um,
                          a.gap_potential_v, null.y()};
        j["stray_field_V_m"] = stray_field(gap, true);
    }

    DesignReportInputs rep;
    {
        std::ostringstream gs;
        gs << geometry.strips().size() << " strip(s), " << geometry.patches().size()
           << " patch(es)";
        rep.geometry_summary = gs.str();
    }
    rep.null_height_um = null.y() / um;
    rep.secular_frequency_mhz = omega_low > 0.0 ? angular_to_mhz(omega_low) : 0.0;
    rep.depth_mev = depth.depth_ev * 1e3;
    if (j.contains("stray_field_V_m"))
        rep.stray_field_v_m = j["stray_field_V_m"].get<double>();
    j["design_report"] = render_design_report(rep);

    std::ostringstream body;
    if (a.format == "json")
        body << j.dump(2) << "\n";
    else
        body << render_analyze_text(j);
    out << body.str();
    return 0;
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

struct GridArgs {
    std::string geometry_path;
    std::string species = "24Mg+";
    double rf_voltage = 0.0;
    double rf_freq_mhz = 0.0;
    std::string region;  // "x0:x1:y0:y1" in um
    int nx = 101, ny = 101;
    double z_um = 0.0;
    std::string output = "-";
};

int cmd_grid(const GridArgs& a, std::ostream& out) {
    const PlanarGeometry geometry = read_geometry_file(a.geometry_path);
    const IonSpecies species = IonSpecies::from_label(a.species);
    PseudoModel model(geometry, {a.rf_voltage, mhz_to_angular(a.rf_freq_mhz)}, species);

    double r[4];
    {
        std::istringstream ss(a.region);
        std::string tok;
        for (int i = 0; i < 4; ++i) {
            if (!std::getline(ss, tok, ':'))
                throw ValidationError("--region must be x0:x1:y0:y1 in um");
            r[i] = std::stod(tok) * um;
        }
    }
    GridSpec spec{r[0], r[1], r[2], r[3], a.nx, a.ny, a.z_um * um};

    std::vector<GridAnnotation> notes;
    const Eigen::Vector3d null = find_rf_null(model, default_null_guess(model));
    notes.push_back({null, "null"});
    try {
        const TrapDepthResult depth = trap_depth(model, null);
        notes.push_back({depth.saddle, "saddle"});
    } catch (const SearchError&) {
        // no saddle in range; the grid is still useful
    }

    std::ostringstream body;
    write_pseudopotential_grid(body, model, spec, notes);
    emit(a.output, body.str(), out);
    return 0;
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

struct DynamicsArgs {
    std::string geometry_path;
    std::string species = "24Mg+";
    double rf_voltage = 0.0;
    double rf_freq_mhz = 0.0;
    double uniform_e0 = 0.0;  // V/m; > 0 selects the uniform-field scenario
    std::string stray;
    double offset_x_um = 0.0, offset_y_um = 0.0, offset_z_um = 0.0;
    double duration_cycles = 500.0;
    int steps_per_cycle = 128;
    std::string trajectory_out;
    std::string spectrum_out;
    std::string format = "text";
};

int cmd_dynamics(const DynamicsArgs& a, std::ostream& out) {
    const IonSpecies species = IonSpecies::from_label(a.species);
    const double omega = mhz_to_angular(a.rf_freq_mhz);
    if (!(omega > 0.0)) throw ValidationError("--rf-frequency-mhz must be positive");
    Eigen::Vector3d stray = Eigen::Vector3d::Zero();
    if (!a.stray.empty()) stray = parse_vec3(a.stray, "--stray-field");

    std::unique_ptr<FieldSource> source;
    Eigen::Vector3d x0(a.offset_x_um * um, a.offset_y_um * um, a.offset_z_um * um);
    if (a.uniform_e0 > 0.0) {
        source = std::make_unique<UniformOscillatingField>(
            Eigen::Vector3d(a.uniform_e0, 0.0, 0.0), omega, 0.0, stray);
    } else {
        if (a.geometry_path.empty())
            throw ValidationError("need --geometry or --uniform-e0");
        PlanarGeometry geometry = read_geometry_file(a.geometry_path);
        DriveConfig drive = DriveConfig::from_geometry(geometry, a.rf_voltage, omega);
        drive.stray_field = stray;
        PseudoModel model(geometry, {a.rf_voltage, omega}, species);
        const Eigen::Vector3d null = find_rf_null(model, default_null_guess(model));
        x0 += null;
        source = std::make_unique<PlanarDrive>(std::move(geometry), std::move(drive));
    }

    const double period = 2.0 * std::numbers::pi / omega;
    const Trajectory traj =
        integrate(*source, species, x0, Eigen::Vector3d::Zero(),
                  a.duration_cycles * period, {a.steps_per_cycle, false});
    if (traj.escaped())
        throw EscapeError("ion escaped at t = " + std::to_string(*traj.escape_time) +
                              " s",
                          *traj.escape_time);
    const SpectralSummary spec = spectral_decompose(traj);

    if (!a.trajectory_out.empty()) {
        std::ostringstream body;
        write_trajectory_csv(body, traj);
        emit(a.trajectory_out, body.str(), out);
    }
    if (!a.spectrum_out.empty()) {
        std::ostringstream body;
        write_spectrum_csv(body, spec);
        emit(a.spectrum_out, body.str(), out);
    }

    json j;
    j["micromotion_amplitude_m"] = spec.micromotion_amplitude;
    j["dominant_frequency_MHz"] = angular_to_mhz(spec.dominant_frequency);
    j["secular_frequencies_MHz"] = json::array();
    for (double w : spec.secular_frequencies)
        j["secular_frequencies_MHz"].push_back(angular_to_mhz(w));
    if (a.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        out << "dynamics summary\n"
            << "  micromotion amplitude: " << spec.micromotion_amplitude << " m\n"
            << "  dominant line:         " << angular_to_mhz(spec.dominant_frequency)
            << " MHz\n";
        out << "  secular lines (MHz):  ";
        for (double w : spec.secular_frequencies) out << ' ' << angular_to_mhz(w);
        out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// waveform
// ---------------------------------------------------------------------------

struct WaveformArgs {
    std::string geometry_path;
    std::string species = "24Mg+";
    double rf_voltage = 0.0;
    double rf_freq_mhz = 0.0;
    double height_um = 0.0;  // 0 -> use the rf null height
    double axial_freq_mhz = 1.0;
    double z_start_um = 0.0, z_end_um = 0.0;
    int steps = 50;
    double duration_us = 50.0;
    double rails_v = 10.0;
    int grid_points = 501;
    bool separate = false;
    int stages = 9;
    std::string output = "-";
};

int cmd_waveform(const WaveformArgs& a, std::ostream& out) {
    const PlanarGeometry geometry = read_geometry_file(a.geometry_path);
    const IonSpecies species = IonSpecies::from_label(a.species);

    double y0 = a.height_um * um;
    if (y0 <= 0.0) {
        PseudoModel model(geometry, {a.rf_voltage, mhz_to_angular(a.rf_freq_mhz)},
                          species);
        y0 = find_rf_null(model, default_null_guess(model)).y();
    }

    // z-grid spanning the segmented control electrodes.
    double zlo = 0.0, zhi = 0.0;
    bool any = false;
    for (const auto& p : geometry.patches()) {
        if (p.role != ElectrodeRole::control) continue;
        zlo = any ? std::min(zlo, p.z0) : p.z0;
        zhi = any ? std::max(zhi, p.z1) : p.z1;
        any = true;
    }
    if (!any) throw ValidationError("geometry has no segmented control electrodes");
    Eigen::VectorXd zgrid(a.grid_points);
    for (int i = 0; i < a.grid_points; ++i)
        zgrid[i] = zlo + (zhi - zlo) * i / (a.grid_points - 1);

    const AxialBasis basis(geometry, zgrid, y0);
    SolveOptions opts;
    opts.rails = a.rails_v;
    const double omega_z = mhz_to_angular(a.axial_freq_mhz);
    const VoltageSequence seq =
        a.separate
            ? separation_ramp(basis, species, omega_z, a.z_start_um * um, a.stages,
                              a.duration_us * 1e-6, std::nullopt, opts)
            : transport_sequence(basis, species, omega_z, a.z_start_um * um,
                                 a.z_end_um * um, a.steps, a.duration_us * 1e-6, opts);

    std::ostringstream body;
    write_waveform_csv(body, seq, basis.labels());
    emit(a.output, body.str(), out);
    out << "secular phase over path: " << seq.total_secular_phase << " rad\n";
    if (!basis.height_verified())
        out << "warning: basis height is not an rf field zero; transport will "
               "ride on intrinsic micromotion\n";
    return 0;
}

// ---------------------------------------------------------------------------
// recool-fit
// ---------------------------------------------------------------------------

struct RecoolArgs {
    std::string curve_path;
    std::string species = "24Mg+";
    double axial_freq_mhz = 1.0;
    double linewidth_mhz = 41.4;
    double wavelength_nm = 280.0;
    double detuning_linewidths = -0.5;
    double s0 = 1.0;
    double cos_theta = 1.0;
    std::string format = "text";
};

int cmd_recool_fit(const RecoolArgs& a, std::ostream& out) {
    std::ifstream f(a.curve_path);
    if (!f) throw ParseError("cannot open curve file '" + a.curve_path + "'", 0);
    const RecoolCurve curve = read_recool_curve(f);

    const IonSpecies species = IonSpecies::from_label(a.species);
    LaserParams laser;
    laser.gamma = mhz_to_angular(a.linewidth_mhz);
    laser.k = 2.0 * std::numbers::pi / (a.wavelength_nm * nm);
    laser.detuning = a.detuning_linewidths * laser.gamma;
    laser.s0 = a.s0;
    laser.cos_theta = a.cos_theta;

    const TemperatureFit fit =
        fit_temperature(curve, mhz_to_angular(a.axial_freq_mhz), species, laser);

    json j;
    j["temperature_K"] = fit.temperature;
    j["ci_low_K"] = fit.ci_low;
    j["ci_high_K"] = fit.ci_high;
    j["low_sensitivity"] = fit.low_sensitivity;
    j["chi2"] = fit.chi2;
    if (a.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        out << "recool fit\n"
            << "  T0 = " << fit.temperature << " K  (1-sigma " << fit.ci_low << " .. "
            << fit.ci_high << ")\n";
        if (fit.low_sensitivity)
            out << "  note: curve carries little temperature information\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// crystal
// ---------------------------------------------------------------------------

struct CrystalArgs {
    std::string species = "24Mg+";
    double axial_freq_mhz = 1.0;
    int ions = 2;
    std::string output = "-";
};

int cmd_crystal(const CrystalArgs& a, std::ostream& out) {
    ChainConfig config{IonSpecies::from_label(a.species), a.ions,
                       mhz_to_angular(a.axial_freq_mhz)};
    const ChainSolution sol = chain_equilibrium(config);
    const ChainModes modes = chain_normal_modes(sol);
    std::ostringstream body;
    write_chain_report(body, sol, modes);
    emit(a.output, body.str(), out);
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// top level
// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"surface-electrode rf ion trap design toolkit"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "trap report for a geometry file");
    analyze->add_option("--geometry", an.geometry_path)->required();
    analyze->add_option("--species", an.species);
    analyze->add_option("--rf-voltage", an.rf_voltage)->required();
    analyze->add_option("--rf-frequency-mhz", an.rf_freq_mhz)->required();
    analyze->add_option("--beam", an.beam);
    analyze->add_option("--stray-field", an.stray);
    analyze->add_option("--wavelength-nm", an.wavelength_nm);
    analyze->add_option("--beam-angle-deg", an.beam_angle_deg);
    analyze->add_option("--gap-width-um", an.gap_width_um);
    analyze->add_option("--gap-thickness-um", an.gap_thickness_um);
    analyze->add_option("--gap-potential-v", an.gap_potential_v);
    analyze->add_option("--format", an.format)
        ->check(CLI::IsMember({"text", "json"}));
    analyze->add_option("--output", an.output);

    GridArgs gr;
    auto* grid = app.add_subcommand("grid", "pseudopotential grid export");
    grid->add_option("--geometry", gr.geometry_path)->required();
    grid->add_option("--species", gr.species);
    grid->add_option("--rf-voltage", gr.rf_voltage)->required();
    grid->add_option("--rf-frequency-mhz", gr.rf_freq_mhz)->required();
    grid->add_option("--region", gr.region)->required();
    grid->add_option("--nx", gr.nx);
    grid->add_option("--ny", gr.ny);
    grid->add_option("--z-um", gr.z_um);
    grid->add_option("--output", gr.output);

    DynamicsArgs dy;
    auto* dynamics = app.add_subcommand("dynamics", "time-domain ion motion");
    dynamics->add_option("--geometry", dy.geometry_path);
    dynamics->add_option("--species", dy.species);
    dynamics->add_option("--rf-voltage", dy.rf_voltage);
    dynamics->add_option("--rf-frequency-mhz", dy.rf_freq_mhz)->required();
    dynamics->add_option("--uniform-e0", dy.uniform_e0);
    dynamics->add_option("--stray-field", dy.stray);
    dynamics->add_option("--offset-x-um", dy.offset_x_um);
    dynamics->add_option("--offset-y-um", dy.offset_y_um);
    dynamics->add_option("--offset-z-um", dy.offset_z_um);
    dynamics->add_option("--duration-cycles", dy.duration_cycles);
    dynamics->add_option("--steps-per-cycle", dy.steps_per_cycle);
    dynamics->add_option("--trajectory-out", dy.trajectory_out);
    dynamics->add_option("--spectrum-out", dy.spectrum_out);
    dynamics->add_option("--format", dy.format)
        ->check(CLI::IsMember({"text", "json"}));

    WaveformArgs wf;
    auto* waveform = app.add_subcommand("waveform", "transport / separation solver");
    waveform->add_option("--geometry", wf.geometry_path)->required();
    waveform->add_option("--species", wf.species);
    waveform->add_option("--rf-voltage", wf.rf_voltage);
    waveform->add_option("--rf-frequency-mhz", wf.rf_freq_mhz);
    waveform->add_option("--height-um", wf.height_um);
    waveform->add_option("--axial-freq-mhz", wf.axial_freq_mhz);
    waveform->add_option("--z-start-um", wf.z_start_um);
    waveform->add_option("--z-end-um", wf.z_end_um);
    waveform->add_option("--steps", wf.steps);
    waveform->add_option("--duration-us", wf.duration_us);
    waveform->add_option("--rails-v", wf.rails_v);
    waveform->add_option("--grid-points", wf.grid_points);
    waveform->add_flag("--separate", wf.separate);
    waveform->add_option("--stages", wf.stages);
    waveform->add_option("--output", wf.output);

    RecoolArgs rc;
    auto* recool = app.add_subcommand("recool-fit", "fit a recooling curve");
    recool->add_option("--curve", rc.curve_path)->required();
    recool->add_option("--species", rc.species);
    recool->add_option("--axial-freq-mhz", rc.axial_freq_mhz);
    recool->add_option("--linewidth-mhz", rc.linewidth_mhz);
    recool->add_option("--wavelength-nm", rc.wavelength_nm);
    recool->add_option("--detuning-linewidths", rc.detuning_linewidths);
    recool->add_option("--s0", rc.s0);
    recool->add_option("--cos-theta", rc.cos_theta);
    recool->add_option("--format", rc.format)->check(CLI::IsMember({"text", "json"}));

    CrystalArgs cr;
    auto* crystal = app.add_subcommand("crystal", "ion chain equilibrium and modes");
    crystal->add_option("--species", cr.species);
    crystal->add_option("--axial-freq-mhz", cr.axial_freq_mhz);
    crystal->add_option("--ions", cr.ions);
    crystal->add_option("--output", cr.output);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(an, out);
        if (grid->parsed()) return cmd_grid(gr, out);
        if (dynamics->parsed()) return cmd_dynamics(dy, out);
        if (waveform->parsed()) return cmd_waveform(wf, out);
        if (recool->parsed()) return cmd_recool_fit(rc, out);
        if (crystal->parsed()) return cmd_crystal(cr, out);
    } catch (const ParseError& e) {
        err << "parse error (line " << e.line << "): " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const LookupError& e) {
        err << "unknown name: " << e.what() << "\n";
        return 2;
    } catch (const FieldDomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "analysis failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace iontrap

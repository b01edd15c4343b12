// SPDX-License-Identifier: Apache-2.0
//
// Time-domain ion dynamics: fixed-step RK4 on m x'' = q E(x, t), windowed
// periodogram analysis, and the closed-form micromotion / sideband results.

#include "iontrap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "iontrap/pseudo.hpp"

namespace iontrap {

namespace {

constexpr double pi = std::numbers::pi;

double normalize_phase(double phase) {
    double p = std::remainder(phase, 2.0 * pi);  // (-pi, pi]
    if (p <= -pi) p += 2.0 * pi;
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Field sources
// ---------------------------------------------------------------------------

UniformOscillatingField::UniformOscillatingField(const Eigen::Vector3d& amplitude,
                                                 double omega, double phase,
                                                 const Eigen::Vector3d& static_field)
    : amplitude_(amplitude), omega_(omega), phase_(phase), static_(static_field) {
    if (!(omega > 0.0)) throw ValidationError("drive frequency must be positive");
}

Eigen::Vector3d UniformOscillatingField::field(const Eigen::Vector3d&, double t) const {
    return amplitude_ * std::cos(omega_ * t + phase_) + static_;
}

QuadrupoleDrive::QuadrupoleDrive(double v0, double r_scale, double omega,
                                 double phase_a, double phase_b, double dipole_weight,
                                 const Eigen::Vector3d& static_field)
    : v0_(v0),
      r2_(r_scale * r_scale),
      r_(r_scale),
      omega_(omega),
      phase_a_(normalize_phase(phase_a)),
      phase_b_(normalize_phase(phase_b)),
      dipole_(dipole_weight),
      static_(static_field) {
    if (!(r_scale > 0.0)) throw ValidationError("quadrupole R must be positive");
    if (!(omega > 0.0)) throw ValidationError("drive frequency must be positive");
}

Eigen::Vector3d QuadrupoleDrive::field(const Eigen::Vector3d& r, double t) const {
    const double ca = std::cos(omega_ * t + phase_a_);
    const double cb = std::cos(omega_ * t + phase_b_);
    // E_e = -(V0/2) cos(.) (s_e w / R + x / R^2, -y / R^2, 0)
    Eigen::Vector3d f;
    f.x() = -(0.5 * v0_) * ((ca + cb) * r.x() / r2_ + (ca - cb) * dipole_ / r_);
    f.y() = (0.5 * v0_) * (ca + cb) * r.y() / r2_;
    f.z() = 0.0;
    return f + static_;
}

bool QuadrupoleDrive::in_domain(const Eigen::Vector3d& r) const {
    // The quadratic expansion is only meaningful near the axis.
    return std::hypot(r.x(), r.y()) < 3.0 * r_;
}

DriveConfig DriveConfig::from_geometry(const PlanarGeometry& g, double amplitude,
                                       double omega_rf) {
    DriveConfig d;
    d.omega_rf = omega_rf;
    const auto rf = g.rf_indices();
    const auto ctrl = g.control_indices();
    d.rf_amplitudes = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rf.size()),
                                                amplitude);
    d.rf_phases.resize(static_cast<Eigen::Index>(rf.size()));
    for (std::size_t i = 0; i < rf.size(); ++i)
        d.rf_phases[static_cast<Eigen::Index>(i)] =
            normalize_phase(g.rf_phase_of(rf[i]));
    d.control_biases.resize(static_cast<Eigen::Index>(ctrl.size()));
    for (std::size_t i = 0; i < ctrl.size(); ++i)
        d.control_biases[static_cast<Eigen::Index>(i)] = g.bias_of(ctrl[i]);
    return d;
}

PlanarDrive::PlanarDrive(PlanarGeometry geometry, DriveConfig drive)
    : geometry_(std::move(geometry)), drive_(std::move(drive)) {
    if (!(drive_.omega_rf > 0.0))
        throw ValidationError("drive frequency must be positive");
    const auto rf = geometry_.rf_indices();
    const auto ctrl = geometry_.control_indices();
    if (static_cast<std::size_t>(drive_.rf_amplitudes.size()) != rf.size())
        throw ValidationError("rf amplitude vector length mismatch");
    if (drive_.rf_phases.size() == 0)
        drive_.rf_phases = Eigen::VectorXd::Zero(drive_.rf_amplitudes.size());
    if (static_cast<std::size_t>(drive_.rf_phases.size()) != rf.size())
        throw ValidationError("rf phase vector length mismatch");
    for (Eigen::Index i = 0; i < drive_.rf_phases.size(); ++i)
        drive_.rf_phases[i] = normalize_phase(drive_.rf_phases[i]);
    if (drive_.control_biases.size() == 0)
        drive_.control_biases = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ctrl.size()));
    if (static_cast<std::size_t>(drive_.control_biases.size()) != ctrl.size())
        throw ValidationError("control bias vector length mismatch");
}

Eigen::Vector3d PlanarDrive::field(const Eigen::Vector3d& r, double t) const {
    Eigen::Vector3d f = drive_.stray_field;
    const auto rf = geometry_.rf_indices();
    for (std::size_t i = 0; i < rf.size(); ++i) {
        const double a = drive_.rf_amplitudes[static_cast<Eigen::Index>(i)];
        if (a == 0.0) continue;
        const double c =
            std::cos(drive_.omega_rf * t + drive_.rf_phases[static_cast<Eigen::Index>(i)]);
        f += a * c * geometry_.unit_field(rf[i], r);
    }
    const auto ctrl = geometry_.control_indices();
    for (std::size_t i = 0; i < ctrl.size(); ++i) {
        const double v = drive_.control_biases[static_cast<Eigen::Index>(i)];
        if (v != 0.0) f += v * geometry_.unit_field(ctrl[i], r);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

Trajectory integrate(const FieldSource& source, const IonSpecies& species,
                     const Eigen::Vector3d& x0, const Eigen::Vector3d& v0,
                     double duration, const IntegrateOptions& opts) {
    const double omega = source.omega_rf();
    if (!(omega > 0.0)) throw ValidationError("field source must define omega_rf > 0");
    if (!source.in_domain(x0))
        throw FieldDomainError("initial position outside the field domain");
    const double period = 2.0 * pi / omega;
    if (!opts.allow_short_run && std::abs(duration) < 10.0 * period)
        throw ValidationError("integration shorter than 10 rf cycles");

    const int spc = std::max(opts.steps_per_cycle, 100);
    const double dt = std::copysign(period / spc, duration);
    const auto n_steps = static_cast<std::size_t>(std::llround(std::abs(duration) / (period / spc)));

    const double qm = species.charge_coulomb() / species.mass_kg();

    Trajectory traj;
    traj.dt = dt;
    traj.samples_per_cycle = spc;
    traj.omega_rf = omega;
    traj.times.reserve(n_steps + 1);
    traj.positions.reserve(n_steps + 1);
    traj.velocities.reserve(n_steps + 1);

    Eigen::Vector3d x = x0, v = v0;
    double t = 0.0;
    traj.times.push_back(t);
    traj.positions.push_back(x);
    traj.velocities.push_back(v);

    auto accel = [&](const Eigen::Vector3d& r, double tt) {
        return (qm * source.field(r, tt)).eval();
    };

    for (std::size_t i = 0; i < n_steps; ++i) {
        const Eigen::Vector3d k1x = v;
        const Eigen::Vector3d k1v = accel(x, t);
        const Eigen::Vector3d k2x = v + 0.5 * dt * k1v;
        const Eigen::Vector3d k2v = accel(x + 0.5 * dt * k1x, t + 0.5 * dt);
        const Eigen::Vector3d k3x = v + 0.5 * dt * k2v;
        const Eigen::Vector3d k3v = accel(x + 0.5 * dt * k2x, t + 0.5 * dt);
        const Eigen::Vector3d k4x = v + dt * k3v;
        const Eigen::Vector3d k4v = accel(x + dt * k3x, t + dt);
        x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t = (i + 1) * dt;
        if (!source.in_domain(x)) {
            traj.escape_time = t;
            break;
        }
        traj.times.push_back(t);
        traj.positions.push_back(x);
        traj.velocities.push_back(v);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Spectral analysis
// ---------------------------------------------------------------------------

namespace {

void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                                     static_cast<double>(n - 1)));
    return w;
}

}  // namespace

Eigen::Vector3cd demodulate(const Trajectory& traj, double omega) {
    const std::size_t n = traj.times.size();
    if (n < 16) throw ValidationError("trajectory too short to demodulate");
    const auto w = hann_window(n);
    double wsum = 0.0;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        mean += w[i] * traj.positions[i];
        wsum += w[i];
    }
    mean /= wsum;
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> ph(std::cos(omega * traj.times[i]),
                                      -std::sin(omega * traj.times[i]));
        acc += (w[i] * ph) * (traj.positions[i] - mean);
    }
    return 2.0 * acc / wsum;
}

SpectralSummary spectral_decompose(const Trajectory& traj) {
    if (traj.escaped())
        throw ValidationError("trajectory escaped the trap; no stationary spectrum");
    const std::size_t n = traj.times.size();
    if (n < 64) throw ValidationError("trajectory too short for spectral analysis");
    const double dt = std::abs(traj.dt);
    const double t_total = dt * static_cast<double>(n - 1);

    const auto w = hann_window(n);
    double wsum = 0.0;
    for (double wi : w) wsum += wi;

    const std::size_t nfft = next_pow2(n);
    std::vector<std::vector<std::complex<double>>> spectra(3);
    for (int axis = 0; axis < 3; ++axis) {
        double mean = 0.0, msum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += w[i] * traj.positions[i][axis];
            msum += w[i];
        }
        mean /= msum;
        std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = w[i] * (traj.positions[i][axis] - mean);
        fft_inplace(buf);
        spectra[axis] = std::move(buf);
    }

    SpectralSummary out;
    const std::size_t nbins = nfft / 2;
    out.frequencies.resize(nbins);
    out.power.assign(nbins, 0.0);
    const double domega = 2.0 * pi / (static_cast<double>(nfft) * dt);
    for (std::size_t k = 0; k < nbins; ++k) {
        out.frequencies[k] = domega * static_cast<double>(k);
        for (int axis = 0; axis < 3; ++axis) {
            const double amp = 2.0 * std::abs(spectra[axis][k]) / wsum;
            out.power[k] += amp * amp;
        }
    }

    // Strongest line overall (skipping DC residue).
    std::size_t k_dom = 1;
    for (std::size_t k = 2; k < nbins; ++k)
        if (out.power[k] > out.power[k_dom]) k_dom = k;
    out.dominant_frequency = out.frequencies[k_dom];

    // Secular peaks: per-axis maxima below omega_rf / 2, refined by parabolic
    // interpolation on log power.
    const double band_edge = 0.5 * traj.omega_rf;
    double total_power = 0.0;
    for (std::size_t k = 1; k < nbins; ++k) total_power += out.power[k];
    for (int axis = 0; axis < 3; ++axis) {
        std::size_t kp = 0;
        double pmax = 0.0;
        for (std::size_t k = 2; k + 1 < nbins && out.frequencies[k] < band_edge; ++k) {
            const double amp = 2.0 * std::abs(spectra[axis][k]) / wsum;
            if (amp * amp > pmax) {
                pmax = amp * amp;
                kp = k;
            }
        }
        if (kp == 0 || pmax < 1e-12 * total_power) continue;
        const auto lp = [&](std::size_t k) {
            return std::log(std::max(std::norm(spectra[axis][k]), 1e-300));
        };
        const double l0 = lp(kp - 1), l1 = lp(kp), l2 = lp(kp + 1);
        const double denom = l0 - 2.0 * l1 + l2;
        const double delta = (denom != 0.0) ? 0.5 * (l0 - l2) / denom : 0.0;
        const double omega_peak =
            domega * (static_cast<double>(kp) + std::clamp(delta, -0.5, 0.5));
        const double cycles = omega_peak * t_total / (2.0 * pi);
        if (cycles < 50.0)
            throw ResolutionError(
                "secular peak unresolved: run covers " + std::to_string(cycles) +
                    " cycles, need >= 50",
                50.0 * 2.0 * pi / omega_peak);
        bool duplicate = false;
        for (double f : out.secular_frequencies)
            if (std::abs(f - omega_peak) < domega) duplicate = true;
        if (!duplicate) out.secular_frequencies.push_back(omega_peak);
    }
    std::sort(out.secular_frequencies.begin(), out.secular_frequencies.end());

    out.micromotion_phasor = demodulate(traj, traj.omega_rf);
    out.micromotion_amplitude = out.micromotion_phasor.norm();
    return out;
}

// ---------------------------------------------------------------------------
// Micromotion relations
// ---------------------------------------------------------------------------

MicromotionReport excess_micromotion(double e_dc, double omega_r, double omega_rf,
                                     const IonSpecies& species) {
    if (!(omega_r > 0.0)) throw ValidationError("secular frequency must be positive");
    if (!(omega_rf > 0.0)) throw ValidationError("rf frequency must be positive");
    MicromotionReport rep;
    const double q = std::abs(species.charge_coulomb());
    rep.displacement = q * std::abs(e_dc) / (species.mass_kg() * omega_r * omega_r);
    rep.secular_position = rep.displacement;
    rep.micromotion_amplitude =
        std::numbers::sqrt2 * (omega_r / omega_rf) * rep.displacement;
    return rep;
}

MicromotionReport excess_micromotion(double e_dc, double omega_r, double omega_rf,
                                     const IonSpecies& species, double lambda,
                                     double theta) {
    MicromotionReport rep = excess_micromotion(e_dc, omega_r, omega_rf, species);
    rep.modulation = modulation_index(rep.micromotion_amplitude, lambda, theta);
    return rep;
}

double modulation_index(double x_um, double lambda, double theta) {
    if (!(lambda > 0.0)) throw ValidationError("wavelength must be positive");
    return std::abs(2.0 * pi * x_um * std::cos(theta) / lambda);
}

std::vector<SidebandLine> sideband_spectrum(double beta) {
    if (!(beta >= 0.0)) throw ValidationError("modulation index must be >= 0");
    const int n_max = static_cast<int>(std::ceil(beta)) + 20;
    std::vector<SidebandLine> lines;
    lines.reserve(2 * n_max + 1);
    for (int n = -n_max; n <= n_max; ++n) {
        const double jn = std::cyl_bessel_j(std::abs(n), beta);
        lines.push_back({n, jn * jn});
    }
    return lines;
}

double fractional_fluorescence_loss(double beta) {
    if (!(beta >= 0.0)) throw ValidationError("modulation index must be >= 0");
    if (beta >= 1.0)
        throw UnsupportedRegimeError(
            "beta^2/2 fluorescence-loss approximation is stated for beta < 1");
    return 0.5 * beta * beta;
}

// ---------------------------------------------------------------------------
// rf phase imbalance
// ---------------------------------------------------------------------------

namespace {

PhaseImbalanceResult imbalance_from_source(const FieldSource& source,
                                           const IonSpecies& species,
                                           const Eigen::Vector3d& null, double lambda,
                                           double theta, int cycles) {
    const double period = 2.0 * pi / source.omega_rf();
    Trajectory traj = integrate(source, species, null, Eigen::Vector3d::Zero(),
                                cycles * period);
    if (traj.escaped())
        throw EscapeError("ion escaped during phase-imbalance integration",
                          *traj.escape_time);
    PhaseImbalanceResult res;
    res.null_point = null;
    res.micromotion_amplitude = demodulate(traj, source.omega_rf()).norm();
    res.beta = modulation_index(res.micromotion_amplitude, lambda, theta);
    return res;
}

}  // namespace

PhaseImbalanceResult phase_imbalance_micromotion(const PlanarGeometry& geometry,
                                                 const DriveConfig& drive,
                                                 const IonSpecies& species,
                                                 double lambda, double theta,
                                                 int cycles) {
    if (geometry.rf_indices().size() < 2)
        throw ValidationError("phase imbalance needs at least two rf electrodes");
    // Park the ion at the balanced-drive pseudopotential minimum.
    const double mean_amp = drive.rf_amplitudes.cwiseAbs().mean();
    PseudoModel balanced(geometry, RfDrive{mean_amp, drive.omega_rf}, species);
    const Eigen::Vector3d null = find_rf_null(balanced, default_null_guess(balanced));
    PlanarDrive source(geometry, drive);
    return imbalance_from_source(source, species, null, lambda, theta, cycles);
}

PhaseImbalanceResult phase_imbalance_micromotion(const QuadrupoleDrive& drive,
                                                 const IonSpecies& species,
                                                 double lambda, double theta,
                                                 int cycles) {
    return imbalance_from_source(drive, species, Eigen::Vector3d::Zero(), lambda,
                                 theta, cycles);
}

// ---------------------------------------------------------------------------
// Exports
// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t_s,x_m,y_m,z_m,vx_m_s,vy_m_s,vz_m_s\n";
    os.precision(12);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& x = traj.positions[i];
        const auto& v = traj.velocities[i];
        os << traj.times[i] << ',' << x.x() << ',' << x.y() << ',' << x.z() << ','
           << v.x() << ',' << v.y() << ',' << v.z() << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const SpectralSummary& spectrum) {
    os << "frequency_Hz,amplitude_m\n";
    os.precision(12);
    for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
        os << hz_from_angular(spectrum.frequencies[k]) << ','
           << std::sqrt(spectrum.power[k]) << '\n';
    }
}

}  // namespace iontrap

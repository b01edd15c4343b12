// SPDX-License-Identifier: Apache-2.0

#include "iontrap/recool.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

namespace iontrap {

namespace {

void validate_laser(const LaserParams& laser) {
    if (!(laser.gamma > 0.0)) throw ValidationError("laser linewidth must be positive");
    if (!(laser.k > 0.0)) throw ValidationError("laser wavevector must be positive");
    if (!(laser.s0 > 0.0)) throw ValidationError("saturation parameter must be positive");
    if (!(std::abs(laser.cos_theta) > 0.0) || std::abs(laser.cos_theta) > 1.0)
        throw ValidationError("|cos_theta| must be in (0, 1]");
}

// Phase-averaged scattering rate and cooling bracket <v R(v)> at energy E.
struct PhaseAverages {
    double rate;     // photons/s
    double v_rate;   // m/s * photons/s
};

class PhaseGrid {
  public:
    explicit PhaseGrid(int n) : sin_(n) {
        for (int i = 0; i < n; ++i)
            sin_[i] = std::sin(2.0 * std::numbers::pi * (i + 0.5) / n);
    }
    PhaseAverages averages(double energy, double mass, const LaserParams& laser) const {
        const double v_max = std::sqrt(std::max(2.0 * energy / mass, 0.0));
        double r = 0.0, vr = 0.0;
        for (double s : sin_) {
            const double v = v_max * s;
            const double rate = scattering_rate(v, laser);
            r += rate;
            vr += v * rate;
        }
        const double n = static_cast<double>(sin_.size());
        return {r / n, vr / n};
    }

  private:
    std::vector<double> sin_;
};

double energy_derivative(const PhaseAverages& avg, const LaserParams& laser,
                         double mass) {
    const double k_eff = laser.k * laser.cos_theta;
    const double cooling = constants::hbar * k_eff * avg.v_rate;  // < 0 for red detuning
    const double heating = constants::hbar * constants::hbar * laser.k * laser.k *
                           avg.rate / mass;
    return cooling + heating;
}

// Gauss-Laguerre nodes and weights for integral_0^inf f(x) e^-x dx.
void gauss_laguerre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0)
            z = 3.0 / (1.0 + 2.4 * n);
        else if (i == 1)
            z += 15.0 / (1.0 + 2.5 * n);
        else
            z += ((1.0 + 2.55 * (i - 1)) / (1.9 * (i - 1))) * (z - x[i - 2]);
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (p1 - p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-14 * z) break;
        }
        x[i] = z;
        // weight via the derivative relation
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (p1 - p2) / z;
        w[i] = -1.0 / (pp * n * p2);
    }
}

}  // namespace

double scattering_rate(double v, const LaserParams& laser) {
    validate_laser(laser);
    const double d = 2.0 * (laser.detuning - laser.k * v * laser.cos_theta) / laser.gamma;
    return 0.5 * laser.gamma * laser.s0 / (1.0 + laser.s0 + d * d);
}

RecoolSim simulate_recooling(double initial_energy, double omega_z,
                             const IonSpecies& species, const LaserParams& laser,
                             double duration, const RecoolOptions& opts) {
    validate_laser(laser);
    if (laser.detuning >= 0.0)
        throw ValidationError("recooling requires red detuning (delta < 0)");
    if (!(initial_energy >= 0.0)) throw ValidationError("initial energy must be >= 0");
    if (!(duration > 0.0)) throw ValidationError("duration must be positive");
    if (opts.bins < 2 || opts.substeps < 1 || opts.phase_points < 8)
        throw ValidationError("bad recool options");

    const double mass = species.mass_kg();
    const PhaseGrid grid(opts.phase_points);
    const double dt = duration / (opts.bins * opts.substeps);

    RecoolSim sim;
    sim.weak_binding_ok = omega_z < laser.gamma / 10.0;
    sim.curve.times.reserve(opts.bins);
    sim.curve.rates.reserve(opts.bins);
    sim.energies.reserve(opts.bins);

    auto dEdt = [&](double e) {
        return energy_derivative(grid.averages(e, mass, laser), laser, mass);
    };

    double e = initial_energy;
    for (int b = 0; b < opts.bins; ++b) {
        double rate_acc = 0.0;
        double energy_mid = e;
        for (int s = 0; s < opts.substeps; ++s) {
            rate_acc += grid.averages(e, mass, laser).rate;
            const double k1 = dEdt(e);
            const double k2 = dEdt(std::max(e + 0.5 * dt * k1, 0.0));
            const double k3 = dEdt(std::max(e + 0.5 * dt * k2, 0.0));
            const double k4 = dEdt(std::max(e + dt * k3, 0.0));
            e = std::max(e + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0);
            if (s == opts.substeps / 2) energy_mid = e;
        }
        sim.curve.times.push_back((b + 0.5) * duration / opts.bins);
        sim.curve.rates.push_back(rate_acc / opts.substeps);
        sim.curve.weights.push_back(1.0);
        sim.energies.push_back(energy_mid);
    }

    const double e_eq = doppler_equilibrium_energy(laser, species);
    sim.steady_rate = grid.averages(e_eq, mass, laser).rate;
    sim.reached_steady = std::abs(e - e_eq) < std::max(e_eq, 1e-300);
    return sim;
}

double doppler_equilibrium_energy(const LaserParams& laser, const IonSpecies& species) {
    validate_laser(laser);
    if (laser.detuning >= 0.0)
        throw ValidationError("equilibrium requires red detuning (delta < 0)");
    const double mass = species.mass_kg();
    const PhaseGrid grid(128);
    auto f = [&](double e) {
        return energy_derivative(grid.averages(e, mass, laser), laser, mass);
    };
    // dE/dt > 0 at E -> 0 (pure recoil heating); bracket a sign change.
    double lo = 1e-3 * constants::hbar * laser.gamma;
    double hi = lo;
    bool bracketed = false;
    for (int i = 0; i < 80; ++i) {
        hi *= 2.0;
        if (f(hi) < 0.0) {
            bracketed = true;
            break;
        }
        lo = hi;
    }
    if (!bracketed)
        throw SearchError("no Doppler equilibrium found (cooling never wins)",
                          {hi, 0.0, 0.0});
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) < 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

bool heating_is_one_dimensional(double omega_hot, double omega_2, double omega_3) {
    return omega_hot < 0.5 * omega_2 && omega_hot < 0.5 * omega_3;
}

RecoolCurve model_curve(double temperature, double omega_z, const IonSpecies& species,
                        const LaserParams& laser, double duration,
                        const FitOptions& opts) {
    if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
    std::vector<double> x, w;
    gauss_laguerre(opts.laguerre_order, x, w);

    RecoolCurve out;
    for (int j = 0; j < opts.laguerre_order; ++j) {
        const double e0 = x[j] * constants::boltzmann * temperature;
        const RecoolSim sim =
            simulate_recooling(e0, omega_z, species, laser, duration, opts.forward);
        if (out.rates.empty()) {
            out.times = sim.curve.times;
            out.rates.assign(sim.curve.rates.size(), 0.0);
            out.weights.assign(sim.curve.rates.size(), 1.0);
        }
        for (std::size_t i = 0; i < out.rates.size(); ++i)
            out.rates[i] += w[j] * sim.curve.rates[i];
    }
    return out;
}

namespace {

std::vector<double> tail_normalized(const std::vector<double>& rates) {
    const std::size_t n = rates.size();
    const std::size_t k0 = n - std::max<std::size_t>(n / 5, 1);
    double tail = 0.0;
    for (std::size_t i = k0; i < n; ++i) tail += rates[i];
    tail /= static_cast<double>(n - k0);
    if (!(tail > 0.0)) throw DegenerateFitError("curve has no late-time fluorescence");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rates[i] / tail;
    return out;
}

}  // namespace

TemperatureFit fit_temperature(const RecoolCurve& curve, double omega_z,
                               const IonSpecies& species, const LaserParams& laser,
                               const FitOptions& opts) {
    validate_laser(laser);
    if (curve.times.size() < 10)
        throw ValidationError("recool curve needs >= 10 bins");
    if (curve.rates.size() != curve.times.size())
        throw ValidationError("curve arrays must have equal length");

    const std::vector<double> data = tail_normalized(curve.rates);
    const double dmax = *std::max_element(data.begin(), data.end());
    const double dmin = *std::min_element(data.begin(), data.end());
    if (dmax - dmin < 1e-9 * dmax)
        throw DegenerateFitError("curve is flat: no temperature information");

    const double dt = curve.times.size() > 1 ? curve.times[1] - curve.times[0]
                                             : curve.times[0] * 2.0;
    const double duration = curve.times.back() + 0.5 * dt;

    FitOptions fopts = opts;
    fopts.forward.bins = static_cast<int>(curve.times.size());

    const double t_dop = constants::hbar * laser.gamma / (2.0 * constants::boltzmann);
    const double t_lo = opts.t_min > 0.0 ? opts.t_min : t_dop / 30.0;
    const double t_hi = opts.t_max > 0.0 ? opts.t_max : t_dop * 3000.0;

    auto chi2_of = [&](double temperature) {
        const RecoolCurve m =
            model_curve(temperature, omega_z, species, laser, duration, fopts);
        const std::vector<double> model = tail_normalized(m.rates);
        double chi2 = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double wgt = curve.weights.empty() ? 1.0 : curve.weights[i];
            const double r = data[i] - model[i];
            chi2 += wgt * r * r;
        }
        return chi2;
    };

    // Golden-section search on log10(T).
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log10(t_lo), b = std::log10(t_hi);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = chi2_of(std::pow(10.0, c));
    double fd = chi2_of(std::pow(10.0, d));
    for (int it = 0; it < 48 && (b - a) > 1e-4; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = chi2_of(std::pow(10.0, c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = chi2_of(std::pow(10.0, d));
        }
    }
    const double t_best = std::pow(10.0, 0.5 * (a + b));
    const double chi_best = chi2_of(t_best);

    TemperatureFit fit;
    fit.temperature = t_best;
    fit.chi2 = chi_best;

    // Curvature-based 1-sigma interval, scaled by the reduced chi-square.
    const double eps = 0.05 * t_best;
    const double chi_p = chi2_of(t_best + eps);
    const double chi_m = chi2_of(std::max(t_best - eps, 0.1 * t_best));
    const double curv = (chi_p - 2.0 * chi_best + chi_m) / (eps * eps);
    const double dof = std::max<double>(static_cast<double>(data.size()) - 1.0, 1.0);
    if (curv > 0.0) {
        const double sigma = std::sqrt(2.0 * std::max(chi_best, 1e-12) / dof / curv);
        fit.ci_low = std::max(t_best - sigma, 0.0);
        fit.ci_high = t_best + sigma;
        fit.low_sensitivity = sigma > t_best;
    } else {
        fit.ci_low = 0.0;
        fit.ci_high = t_hi;
        fit.low_sensitivity = true;
    }
    if (dmax - dmin < 0.02 * dmax) fit.low_sensitivity = true;
    return fit;
}

RecoolCurve read_recool_curve(std::istream& is) {
    RecoolCurve curve;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {  // first non-comment row is the header
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        double vals[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, tok, ','))
                throw ParseError("expected 3 comma-separated fields", line_no);
            try {
                vals[i] = std::stod(tok);
            } catch (const std::exception&) {
                throw ParseError("bad number '" + tok + "'", line_no);
            }
        }
        const double t = vals[0], counts = vals[1], width = vals[2];
        if (!(width > 0.0)) throw ParseError("bin width must be positive", line_no);
        if (counts < 0.0) throw ParseError("counts must be >= 0", line_no);
        curve.times.push_back(t);
        curve.rates.push_back(counts / width);
        // shot-noise weight: 1/sigma^2 with sigma_rate = sqrt(counts)/width
        curve.weights.push_back(width * width / std::max(counts, 1.0));
    }
    if (curve.times.empty()) throw ParseError("no data rows", line_no);
    return curve;
}

}  // namespace iontrap

// SPDX-License-Identifier: Apache-2.0
//
// Axial waveform engineering.  solve_well matches local Taylor coefficients
// of the composed axial potential (slope, curvature, optional quartic term)
// in a bounded least-squares sense; redundant electrodes (identical basis
// columns, e.g. mirror pairs) are ganged to a common voltage unless the
// caller asks for an error instead.

#include "iontrap/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace iontrap {

// ---------------------------------------------------------------------------
// Bounded least squares (primal active set)
// ---------------------------------------------------------------------------

Eigen::VectorXd bounded_least_squares(const Eigen::MatrixXd& a,
                                      const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& lower,
                                      const Eigen::VectorXd& upper) {
    const Eigen::Index n = a.cols();
    if (b.size() != a.rows() || lower.size() != n || upper.size() != n)
        throw ValidationError("bounded_least_squares: dimension mismatch");
    for (Eigen::Index j = 0; j < n; ++j)
        if (!(lower[j] <= upper[j]))
            throw ValidationError("bounded_least_squares: lower > upper");

    enum class State { free, lower, upper };
    std::vector<State> state(static_cast<std::size_t>(n), State::free);
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = std::clamp(0.0, lower[j], upper[j]);

    const double kkt_tol = 1e-10 * (a.transpose() * b).cwiseAbs().maxCoeff() + 1e-300;
    const int max_iter = 50 * static_cast<int>(n) + 50;

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<Eigen::Index> free_idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (state[static_cast<std::size_t>(j)] == State::free) free_idx.push_back(j);

        Eigen::VectorXd x_trial = x;
        if (!free_idx.empty()) {
            Eigen::VectorXd rhs = b;
            for (Eigen::Index j = 0; j < n; ++j)
                if (state[static_cast<std::size_t>(j)] != State::free)
                    rhs -= a.col(j) * x[j];
            Eigen::MatrixXd af(a.rows(), static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t k = 0; k < free_idx.size(); ++k)
                af.col(static_cast<Eigen::Index>(k)) = a.col(free_idx[k]);
            const Eigen::VectorXd xf = af.colPivHouseholderQr().solve(rhs);
            for (std::size_t k = 0; k < free_idx.size(); ++k)
                x_trial[free_idx[k]] = xf[static_cast<Eigen::Index>(k)];
        }

        // If the free solve violates a bound, step as far as possible and fix
        // the blocking variable at its bound.
        double alpha = 1.0;
        Eigen::Index blocker = -1;
        State blocker_state = State::free;
        for (Eigen::Index j : free_idx) {
            const double dj = x_trial[j] - x[j];
            if (dj > 0.0 && x_trial[j] > upper[j]) {
                const double aj = (upper[j] - x[j]) / dj;
                if (aj < alpha) {
                    alpha = aj;
                    blocker = j;
                    blocker_state = State::upper;
                }
            } else if (dj < 0.0 && x_trial[j] < lower[j]) {
                const double aj = (lower[j] - x[j]) / dj;
                if (aj < alpha) {
                    alpha = aj;
                    blocker = j;
                    blocker_state = State::lower;
                }
            }
        }
        if (blocker >= 0) {
            for (Eigen::Index j : free_idx) x[j] += alpha * (x_trial[j] - x[j]);
            x[blocker] = blocker_state == State::upper ? upper[blocker] : lower[blocker];
            state[static_cast<std::size_t>(blocker)] = blocker_state;
            continue;
        }
        x = x_trial;

        // KKT check: release the most profitable bound variable, if any.
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index release = -1;
        double worst = kkt_tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            const State s = state[static_cast<std::size_t>(j)];
            if (s == State::lower && w[j] > worst) {
                worst = w[j];
                release = j;
            } else if (s == State::upper && -w[j] > worst) {
                worst = -w[j];
                release = j;
            }
        }
        if (release < 0) return x;
        state[static_cast<std::size_t>(release)] = State::free;
    }
    throw OptimizationError("bounded_least_squares: active-set iteration limit");
}

// ---------------------------------------------------------------------------
// AxialBasis
// ---------------------------------------------------------------------------

AxialBasis::AxialBasis(PlanarGeometry geometry, Eigen::VectorXd zgrid, double y0,
                       double x0)
    : geometry_(std::move(geometry)), zgrid_(std::move(zgrid)), y0_(y0), x0_(x0) {
    if (!(y0_ > 0.0)) throw FieldDomainError("basis height must satisfy y > 0");
    if (zgrid_.size() < 7)
        throw ValidationError("axial basis needs a z-grid of >= 7 samples");
    for (Eigen::Index i = 0; i + 1 < zgrid_.size(); ++i)
        if (!(zgrid_[i] < zgrid_[i + 1]))
            throw ValidationError("z-grid must be strictly increasing");

    for (std::size_t e : geometry_.control_indices()) {
        if (e >= geometry_.strips().size()) {  // patches only: strips are z-invariant
            electrodes_.push_back(e);
            labels_.push_back(geometry_.label_of(e));
        }
    }
    if (electrodes_.size() < 3)
        throw ValidationError("axial basis needs >= 3 segmented control electrodes");

    samples_.resize(zgrid_.size(), static_cast<Eigen::Index>(electrodes_.size()));
    for (Eigen::Index i = 0; i < zgrid_.size(); ++i) {
        const Eigen::Vector3d r(x0_, y0_, zgrid_[i]);
        for (std::size_t k = 0; k < electrodes_.size(); ++k)
            samples_(i, static_cast<Eigen::Index>(k)) =
                geometry_.unit_potential(electrodes_[k], r);
    }

    std::vector<double> widths;
    for (std::size_t e : electrodes_) {
        const auto& p = geometry_.patches()[e - geometry_.strips().size()];
        widths.push_back(p.z1 - p.z0);
    }
    std::nth_element(widths.begin(), widths.begin() + widths.size() / 2, widths.end());
    pitch_ = widths[widths.size() / 2];

    // The basis height should be an rf field zero, otherwise transport rides
    // on intrinsic micromotion.
    height_verified_ = false;
    const auto rf = geometry_.rf_indices();
    if (!rf.empty()) {
        const Eigen::Vector3d mid(x0_, y0_, 0.5 * (zgrid_[0] + zgrid_[zgrid_.size() - 1]));
        Eigen::Vector3d f = Eigen::Vector3d::Zero();
        for (std::size_t e : rf) f += geometry_.unit_field(e, mid);
        height_verified_ = f.norm() * geometry_.length_scale() < 1e-6;
    }
}

Eigen::VectorXd AxialBasis::derivative_row(int order, double z0) const {
    if (order < 0 || order > 6)
        throw ValidationError("derivative order must be in [0, 6]");
    if (z0 < zgrid_[0] || z0 > zgrid_[zgrid_.size() - 1])
        throw ValidationError("evaluation point outside the basis z-grid");

    // 7-point window centred on the nearest grid point.
    Eigen::Index nearest = 0;
    double best = std::abs(zgrid_[0] - z0);
    for (Eigen::Index i = 1; i < zgrid_.size(); ++i) {
        const double d = std::abs(zgrid_[i] - z0);
        if (d < best) {
            best = d;
            nearest = i;
        }
    }
    const Eigen::Index lo =
        std::clamp<Eigen::Index>(nearest - 3, 0, zgrid_.size() - 7);

    const double h = (zgrid_[lo + 6] - zgrid_[lo]) / 6.0;
    Eigen::MatrixXd vand(7, 7);
    for (int i = 0; i < 7; ++i) {
        const double u = (zgrid_[lo + i] - z0) / h;
        double p = 1.0;
        for (int k = 0; k < 7; ++k) {
            vand(i, k) = p;
            p *= u;
        }
    }
    const Eigen::MatrixXd coeffs =
        vand.colPivHouseholderQr().solve(samples_.middleRows(lo, 7));

    double factorial = 1.0;
    for (int k = 2; k <= order; ++k) factorial *= k;
    return coeffs.row(order).transpose() * factorial / std::pow(h, order);
}

double AxialBasis::compose(const Eigen::VectorXd& volts, double z) const {
    if (static_cast<std::size_t>(volts.size()) != electrodes_.size())
        throw ValidationError("voltage vector length mismatch");
    const Eigen::Vector3d r(x0_, y0_, z);
    double phi = 0.0;
    for (std::size_t k = 0; k < electrodes_.size(); ++k)
        if (volts[static_cast<Eigen::Index>(k)] != 0.0)
            phi += volts[static_cast<Eigen::Index>(k)] *
                   geometry_.unit_potential(electrodes_[k], r);
    return phi;
}

// ---------------------------------------------------------------------------
// solve_well
// ---------------------------------------------------------------------------

namespace {

template <typename F>
double golden_min(F&& f, double lo, double hi, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<std::vector<std::size_t>> find_ganged_groups(const Eigen::MatrixXd& cols) {
    const auto n = static_cast<std::size_t>(cols.cols());
    std::vector<std::vector<std::size_t>> groups;
    std::vector<bool> assigned(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        std::vector<std::size_t> group{i};
        assigned[i] = true;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (assigned[j]) continue;
            const double scale = std::max(cols.col(static_cast<Eigen::Index>(i)).norm(),
                                          cols.col(static_cast<Eigen::Index>(j)).norm());
            if ((cols.col(static_cast<Eigen::Index>(i)) -
                 cols.col(static_cast<Eigen::Index>(j)))
                    .norm() < 1e-10 * scale) {
                group.push_back(j);
                assigned[j] = true;
            }
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

struct TargetedSolve {
    Eigen::VectorXd voltages;
    double residual = 0.0;
    std::vector<std::vector<std::size_t>> ganged;
};

// Match [slope, curvature, (4th derivative)] of the composed potential at z0.
TargetedSolve solve_targets(const AxialBasis& basis, double z0, double slope,
                            double curvature, std::optional<double> fourth,
                            const SolveOptions& opts) {
    const auto ne = static_cast<Eigen::Index>(basis.electrode_count());
    const double pitch = basis.pitch();

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> targets;
    rows.push_back(basis.derivative_row(1, z0) * pitch);
    targets.push_back(slope * pitch);
    rows.push_back(basis.derivative_row(2, z0) * pitch * pitch);
    targets.push_back(curvature * pitch * pitch);
    if (fourth) {
        rows.push_back(basis.derivative_row(4, z0) * std::pow(pitch, 4));
        targets.push_back(*fourth * std::pow(pitch, 4));
    }
    // Optional value matching over a window (Taylor polynomial as target);
    // the unknown potential offset rides in an extra free column.
    std::vector<Eigen::VectorXd> wrows;
    std::vector<double> wtargets;
    if (opts.window_halfwidth > 0.0 && opts.window_points > 1) {
        for (int i = 0; i < opts.window_points; ++i) {
            const double u = -opts.window_halfwidth +
                             2.0 * opts.window_halfwidth * i / (opts.window_points - 1);
            Eigen::VectorXd row(ne);
            for (Eigen::Index e = 0; e < ne; ++e) {
                // nearest-sample interpolation is enough for a soft constraint
                Eigen::Index k = 0;
                double bestd = std::abs(basis.zgrid()[0] - (z0 + u));
                for (Eigen::Index g = 1; g < basis.zgrid().size(); ++g) {
                    const double d = std::abs(basis.zgrid()[g] - (z0 + u));
                    if (d < bestd) {
                        bestd = d;
                        k = g;
                    }
                }
                row[e] = basis.samples()(k, e);
            }
            wrows.push_back(row);
            double poly = slope * u + 0.5 * curvature * u * u;
            if (fourth) poly += (*fourth / 24.0) * std::pow(u, 4);
            wtargets.push_back(poly);
        }
    }

    const auto groups = find_ganged_groups(basis.samples());
    const bool has_duplicates =
        std::any_of(groups.begin(), groups.end(),
                    [](const auto& g) { return g.size() > 1; });
    if (has_duplicates && opts.reject_degenerate) {
        std::string msg = "redundant electrodes:";
        for (const auto& g : groups) {
            if (g.size() < 2) continue;
            for (std::size_t e : g) msg += " " + basis.labels()[e];
            msg += ";";
        }
        throw DegenerateBasisError(msg);
    }

    const auto ng = static_cast<Eigen::Index>(groups.size());
    const auto nt = static_cast<Eigen::Index>(rows.size());
    const auto nw = static_cast<Eigen::Index>(wrows.size());
    const Eigen::Index extra = nw > 0 ? 1 : 0;  // nuisance offset column

    double row_scale = 0.0;
    for (const auto& r : rows) row_scale = std::max(row_scale, r.cwiseAbs().maxCoeff());
    const double mu = 1e-6 * (row_scale > 0.0 ? row_scale : 1.0);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nt + nw + ng + extra, ng + extra);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nt + nw + ng + extra);
    for (Eigen::Index t = 0; t < nt; ++t) {
        for (Eigen::Index g = 0; g < ng; ++g)
            for (std::size_t e : groups[static_cast<std::size_t>(g)])
                a(t, g) += rows[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(e)];
        b[t] = targets[static_cast<std::size_t>(t)];
    }
    for (Eigen::Index t = 0; t < nw; ++t) {
        for (Eigen::Index g = 0; g < ng; ++g)
            for (std::size_t e : groups[static_cast<std::size_t>(g)])
                a(nt + t, g) +=
                    wrows[static_cast<std::size_t>(t)][static_cast<Eigen::Index>(e)];
        if (extra) a(nt + t, ng) = 1.0;  // offset
        b[nt + t] = wtargets[static_cast<std::size_t>(t)];
    }
    for (Eigen::Index g = 0; g < ng + extra; ++g) a(nt + nw + g, g) = mu;

    Eigen::VectorXd lower = Eigen::VectorXd::Constant(ng + extra, -opts.rails);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(ng + extra, opts.rails);
    if (extra) {
        lower[ng] = -1e30;
        upper[ng] = 1e30;
    }

    const Eigen::VectorXd sol = bounded_least_squares(a, b, lower, upper);

    TargetedSolve out;
    out.ganged = groups;
    out.voltages = Eigen::VectorXd::Zero(ne);
    for (Eigen::Index g = 0; g < ng; ++g)
        for (std::size_t e : groups[static_cast<std::size_t>(g)])
            out.voltages[static_cast<Eigen::Index>(e)] = sol[g];

    double res2 = 0.0, t2 = 0.0;
    for (Eigen::Index t = 0; t < nt; ++t) {
        const double achieved = a.row(t).head(ng + extra).dot(sol);
        res2 += (achieved - b[t]) * (achieved - b[t]);
        t2 += b[t] * b[t];
    }
    const double tscale = std::max(std::sqrt(t2), row_scale);
    out.residual = tscale > 0.0 ? std::sqrt(res2) / tscale : std::sqrt(res2);
    if (out.residual > opts.infeasible_tol)
        throw InfeasibleError("well targets infeasible under +-" +
                                  std::to_string(opts.rails) +
                                  " V rails (relative residual " +
                                  std::to_string(out.residual) + ")",
                              out.residual);
    return out;
}

struct WellDiagnostics {
    double center;
    double omega_z;
    double curvature_at_center;
    double curvature_at_target;
    double quartic_at_target;
    std::vector<double> minima;
    double barrier_ev;
};

// Everything here is recomputed from the analytic composed potential:
// direct minimisation for the centre, finite differences for curvatures.
WellDiagnostics well_diagnostics(const AxialBasis& basis, const Eigen::VectorXd& v,
                                 double z0, const IonSpecies& species) {
    const double pitch = basis.pitch();
    const double zlo = std::max(z0 - 2.0 * pitch, basis.zgrid()[0]);
    const double zhi = std::min(z0 + 2.0 * pitch, basis.zgrid()[basis.zgrid().size() - 1]);
    auto phi = [&](double z) { return basis.compose(v, z); };

    // All local minima of the sampled potential, refined by golden section.
    const int n = 801;
    std::vector<double> zs(n), ps(n);
    for (int i = 0; i < n; ++i) {
        zs[i] = zlo + (zhi - zlo) * i / (n - 1);
        ps[i] = phi(zs[i]);
    }
    std::vector<double> minima;
    for (int i = 1; i + 1 < n; ++i) {
        if (ps[i] < ps[i - 1] && ps[i] < ps[i + 1])
            minima.push_back(golden_min(phi, zs[i - 1], zs[i + 1], 1e-7 * pitch));
    }

    WellDiagnostics d{};
    d.minima = minima;
    if (minima.empty()) {
        d.center = z0;
    } else {
        d.center = *std::min_element(minima.begin(), minima.end(),
                                     [&](double a, double b) {
                                         return std::abs(a - z0) < std::abs(b - z0);
                                     });
    }

    const double h2 = pitch / 200.0;
    auto curvature_at = [&](double z) {
        return (phi(z + h2) - 2.0 * phi(z) + phi(z - h2)) / (h2 * h2);
    };
    d.curvature_at_center = curvature_at(d.center);
    d.curvature_at_target = curvature_at(z0);

    const double h4 = pitch / 30.0;
    d.quartic_at_target = (phi(z0 + 2.0 * h4) - 4.0 * phi(z0 + h4) + 6.0 * phi(z0) -
                           4.0 * phi(z0 - h4) + phi(z0 - 2.0 * h4)) /
                          (24.0 * std::pow(h4, 4));

    const double q = species.charge_coulomb();
    const double qc = q * d.curvature_at_center;
    d.omega_z = qc > 0.0 ? std::sqrt(qc / species.mass_kg()) : 0.0;

    d.barrier_ev = 0.0;
    if (minima.size() >= 2) {
        std::vector<double> two = minima;
        std::sort(two.begin(), two.end(), [&](double a, double b) {
            return std::abs(a - z0) < std::abs(b - z0);
        });
        two.resize(2);
        const double u0 = q * phi(z0);
        const double uw = std::max(q * phi(two[0]), q * phi(two[1]));
        d.barrier_ev = (u0 - uw) / constants::elementary_charge;
    }
    return d;
}

}  // namespace

WellSolution solve_well(const AxialBasis& basis, const WellSpec& spec,
                        const SolveOptions& opts) {
    if (!(spec.omega_z >= 0.0))
        throw ValidationError("well curvature target omega_z must be >= 0");
    if (spec.omega_z == 0.0 && (!spec.quartic || !(*spec.quartic > 0.0)))
        throw ValidationError("a zero-curvature well needs a positive quartic term");
    if (spec.center < basis.zgrid()[0] ||
        spec.center > basis.zgrid()[basis.zgrid().size() - 1])
        throw ValidationError("well centre outside the electrode span");

    const double q = spec.species.charge_coulomb();
    const double curvature =
        spec.species.mass_kg() * spec.omega_z * spec.omega_z / q;
    std::optional<double> fourth;
    if (spec.quartic) fourth = 24.0 * (*spec.quartic);

    const TargetedSolve ts = solve_targets(basis, spec.center, 0.0, curvature,
                                           fourth, opts);
    const WellDiagnostics d =
        well_diagnostics(basis, ts.voltages, spec.center, spec.species);

    WellSolution out;
    out.voltages = ts.voltages;
    out.residual = ts.residual;
    out.ganged = ts.ganged;
    out.achieved_center = d.center;
    out.achieved_omega_z = d.omega_z;
    out.achieved_curvature = d.curvature_at_target;
    out.achieved_quartic = d.quartic_at_target;
    return out;
}

VoltageSequence transport_sequence(const AxialBasis& basis, const IonSpecies& species,
                                   double omega_z, double z_start, double z_end,
                                   int steps, double duration,
                                   const SolveOptions& opts) {
    if (steps < 2) throw ValidationError("transport needs >= 2 steps");
    if (!(omega_z > 0.0)) throw ValidationError("transport omega_z must be positive");

    VoltageSequence seq;
    seq.step_secular_phase = duration / (steps - 1) * omega_z;
    seq.total_secular_phase = duration * omega_z;
    for (int i = 0; i < steps; ++i) {
        const double z = z_start + (z_end - z_start) * i / (steps - 1);
        WellSpec spec{z, omega_z, std::nullopt, species};
        try {
            const WellSolution w = solve_well(basis, spec, opts);
            SequenceStep step;
            step.time = duration * i / (steps - 1);
            step.voltages = w.voltages;
            step.target_center = z;
            step.achieved_center = w.achieved_center;
            step.achieved_omega_z = w.achieved_omega_z;
            step.achieved_curvature = w.achieved_curvature;
            step.achieved_quartic = w.achieved_quartic;
            step.minima = {w.achieved_center};
            seq.steps.push_back(std::move(step));
            seq.max_omega_deviation =
                std::max(seq.max_omega_deviation,
                         std::abs(w.achieved_omega_z / omega_z - 1.0));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("transport step " + std::to_string(i) +
                                      " infeasible: " + e.what(),
                                  e.best_residual);
        }
    }
    return seq;
}

VoltageSequence separation_ramp(const AxialBasis& basis, const IonSpecies& species,
                                double omega_z, double z0, int stages,
                                double duration, std::optional<double> kappa4,
                                const SolveOptions& opts) {
    if (stages < 3) throw ValidationError("separation needs >= 3 stages");
    if (!(omega_z > 0.0)) throw ValidationError("initial omega_z must be positive");

    const double q = species.charge_coulomb();
    const double c0 = species.mass_kg() * omega_z * omega_z / q;
    const double k4 = kappa4.value_or(c0 / (basis.pitch() * basis.pitch()));
    if (!(k4 > 0.0) != !(c0 > 0.0))  // quartic must confine like the initial well
        throw ValidationError("kappa4 must have the confining sign");

    VoltageSequence seq;
    seq.step_secular_phase = duration / (stages - 1) * omega_z;
    seq.total_secular_phase = duration * omega_z;
    for (int k = 0; k < stages; ++k) {
        const double frac = static_cast<double>(k) / (stages - 1);
        const double curvature = c0 * (1.0 - 2.0 * frac);
        try {
            const TargetedSolve ts =
                solve_targets(basis, z0, 0.0, curvature, 24.0 * k4, opts);
            const WellDiagnostics d = well_diagnostics(basis, ts.voltages, z0, species);
            SequenceStep step;
            step.time = duration * frac;
            step.voltages = ts.voltages;
            step.target_center = z0;
            step.achieved_center = d.center;
            step.achieved_omega_z = d.omega_z;
            step.achieved_curvature = d.curvature_at_target;
            step.achieved_quartic = d.quartic_at_target;
            step.minima = d.minima;
            step.barrier_ev = d.barrier_ev;
            seq.steps.push_back(std::move(step));
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("separation stage " + std::to_string(k) +
                                      " infeasible: " + e.what(),
                                  e.best_residual);
        }
    }
    return seq;
}

void write_waveform_csv(std::ostream& os, const VoltageSequence& seq,
                        const std::vector<std::string>& labels) {
    os << "step,time_s";
    for (const auto& l : labels) os << ",V_" << l;
    os << ",z0_achieved_m,omega_z_achieved_rad_s\n";
    os.precision(12);
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        const auto& s = seq.steps[i];
        os << i << ',' << s.time;
        for (Eigen::Index j = 0; j < s.voltages.size(); ++j) os << ',' << s.voltages[j];
        os << ',' << s.achieved_center << ',' << s.achieved_omega_z << '\n';
    }
}

}  // namespace iontrap

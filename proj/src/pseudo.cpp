// SPDX-License-Identifier: Apache-2.0
//
// Pseudopotential analysis.  For strip-only rf electrodes every quantity up
// to the Hessian of |E0|^2 is evaluated from the complex potential, so the
// null search, mode solver and saddle refinement all run on exact
// derivatives.  Geometries whose rf electrodes include patches fall back to
// finite differences of the analytic field/energy.

#include "iontrap/pseudo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>

namespace iontrap {

namespace {

constexpr double ev = constants::elementary_charge;

struct StripDerivSums {
    std::complex<double> s1{0.0, 0.0}, s2{0.0, 0.0}, s3{0.0, 0.0};
};

}  // namespace

// ---------------------------------------------------------------------------
// StaticPotential
// ---------------------------------------------------------------------------

StaticPotential StaticPotential::from_biases(const PlanarGeometry& g,
                                             Eigen::VectorXd biases,
                                             const Eigen::Vector3d& uniform_field) {
    if (static_cast<std::size_t>(biases.size()) != g.electrode_count())
        throw ValidationError("static bias vector length does not match electrode count");
    StaticPotential s;
    s.geometry_ = &g;
    s.biases_ = std::move(biases);
    s.uniform_field_ = uniform_field;
    return s;
}

StaticPotential StaticPotential::uniform(const Eigen::Vector3d& field) {
    StaticPotential s;
    s.uniform_field_ = field;
    return s;
}

StaticPotential StaticPotential::quadrupole(const Eigen::Matrix3d& curvature) {
    if ((curvature - curvature.transpose()).norm() > 1e-12 * (1.0 + curvature.norm()))
        throw ValidationError("static quadrupole curvature must be symmetric");
    if (std::abs(curvature.trace()) > 1e-9 * (1.0 + curvature.norm()))
        throw ValidationError("static quadrupole curvature must be traceless");
    StaticPotential s;
    s.curvature_ = curvature;
    return s;
}

StaticPotential StaticPotential::intrinsic_offset(const PlanarGeometry& g, double offset) {
    StaticPotential s;
    s.geometry_ = &g;
    s.intrinsic_ = true;
    s.offset_ = offset;
    return s;
}

double StaticPotential::value(const Eigen::Vector3d& r) const {
    double phi = -uniform_field_.dot(r) + 0.5 * r.dot(curvature_ * r);
    if (geometry_) {
        if (intrinsic_) {
            double rf_sum = 0.0;
            for (std::size_t e : geometry_->rf_indices())
                rf_sum += geometry_->unit_potential(e, r);
            phi += offset_ * (1.0 - rf_sum);
        } else {
            for (std::size_t e = 0; e < geometry_->electrode_count(); ++e)
                if (biases_[static_cast<Eigen::Index>(e)] != 0.0)
                    phi += biases_[static_cast<Eigen::Index>(e)] *
                           geometry_->unit_potential(e, r);
        }
    }
    return phi;
}

Eigen::Vector3d StaticPotential::gradient(const Eigen::Vector3d& r) const {
    Eigen::Vector3d g = -uniform_field_ + curvature_ * r;
    if (geometry_) {
        if (intrinsic_) {
            for (std::size_t e : geometry_->rf_indices())
                g += offset_ * geometry_->unit_field(e, r);  // -offset * grad(phi_e)... field = -grad
        } else {
            for (std::size_t e = 0; e < geometry_->electrode_count(); ++e)
                if (biases_[static_cast<Eigen::Index>(e)] != 0.0)
                    g -= biases_[static_cast<Eigen::Index>(e)] *
                         geometry_->unit_field(e, r);
        }
    }
    return g;
}

Eigen::Matrix3d StaticPotential::hessian(const Eigen::Vector3d& r) const {
    Eigen::Matrix3d h = curvature_;
    if (geometry_) {
        if (intrinsic_) {
            for (std::size_t e : geometry_->rf_indices())
                h -= offset_ * geometry_->unit_hessian(e, r);
        } else {
            for (std::size_t e = 0; e < geometry_->electrode_count(); ++e)
                if (biases_[static_cast<Eigen::Index>(e)] != 0.0)
                    h += biases_[static_cast<Eigen::Index>(e)] *
                         geometry_->unit_hessian(e, r);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// PseudoModel
// ---------------------------------------------------------------------------

PseudoModel::PseudoModel(PlanarGeometry geometry, RfDrive drive, IonSpecies species)
    : geometry_(std::move(geometry)), drive_(drive), species_(std::move(species)) {
    if (!(drive_.amplitude > 0.0))
        throw ValidationError("rf drive amplitude must be positive");
    if (!(drive_.omega_rf > 0.0))
        throw ValidationError("rf drive frequency must be positive");
    scale_ = geometry_.length_scale();
    rf_ = geometry_.rf_indices();
    if (rf_.empty())
        throw ValidationError("geometry has no rf electrodes");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto feed = [&](double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    for (std::size_t e : rf_) {
        if (e < geometry_.strips().size()) {
            feed(geometry_.strips()[e].a);
            feed(geometry_.strips()[e].b);
        } else {
            const auto& p = geometry_.patches()[e - geometry_.strips().size()];
            feed(p.x0);
            feed(p.x1);
        }
    }
    rf_scale_ = hi > lo ? hi - lo : scale_;
    rf_center_x_ = hi > lo ? 0.5 * (lo + hi) : 0.0;
    const double q = species_.charge_coulomb();
    energy_factor_ =
        q * q / (4.0 * species_.mass_kg() * drive_.omega_rf * drive_.omega_rf);
}

namespace {

// Sum of complex strip derivatives over the rf electrodes; valid only when
// every rf electrode is a strip.
StripDerivSums rf_strip_derivs(const PlanarGeometry& g,
                               const std::vector<std::size_t>& rf,
                               const Eigen::Vector3d& r) {
    StripDerivSums sums;
    for (std::size_t e : rf) {
        const auto d = strip_complex_derivs(g.strips()[e], r.x(), r.y());
        sums.s1 += d.d1;
        sums.s2 += d.d2;
        sums.s3 += d.d3;
    }
    return sums;
}

bool rf_all_strips(const PlanarGeometry& g, const std::vector<std::size_t>& rf) {
    for (std::size_t e : rf)
        if (e >= g.strips().size()) return false;
    return true;
}

}  // namespace

Eigen::Vector3d PseudoModel::rf_field(const Eigen::Vector3d& r) const {
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    for (std::size_t e : rf_) f += geometry_.unit_field(e, r);
    return drive_.amplitude * f;
}

Eigen::Matrix3d PseudoModel::rf_field_jacobian(const Eigen::Vector3d& r) const {
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t e : rf_) h += geometry_.unit_hessian(e, r);
    return -drive_.amplitude * h;  // dE/dr = -Hess(phi)
}

double PseudoModel::energy(const Eigen::Vector3d& r) const {
    return energy_factor_ * rf_field(r).squaredNorm();
}

double PseudoModel::potential_ev(const Eigen::Vector3d& r) const {
    return energy(r) / ev;
}

Eigen::Vector3d PseudoModel::energy_gradient(const Eigen::Vector3d& r) const {
    const Eigen::Vector3d e0 = rf_field(r);
    const Eigen::Matrix3d j = rf_field_jacobian(r);
    return 2.0 * energy_factor_ * j.transpose() * e0;
}

Eigen::Matrix3d PseudoModel::energy_hessian(const Eigen::Vector3d& r) const {
    if (rf_all_strips(geometry_, rf_)) {
        const double a = drive_.amplitude;
        const auto s = rf_strip_derivs(geometry_, rf_, r);
        const double ex = -a * s.s1.imag();
        const double ey = -a * s.s1.real();
        Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
        j(0, 0) = -a * s.s2.imag();
        j(0, 1) = j(1, 0) = -a * s.s2.real();
        j(1, 1) = a * s.s2.imag();
        Eigen::Matrix3d hx = Eigen::Matrix3d::Zero();  // second derivatives of Ex
        hx(0, 0) = -a * s.s3.imag();
        hx(0, 1) = hx(1, 0) = -a * s.s3.real();
        hx(1, 1) = a * s.s3.imag();
        Eigen::Matrix3d hy = Eigen::Matrix3d::Zero();  // second derivatives of Ey
        hy(0, 0) = -a * s.s3.real();
        hy(0, 1) = hy(1, 0) = a * s.s3.imag();
        hy(1, 1) = a * s.s3.real();
        return 2.0 * energy_factor_ * (j.transpose() * j + ex * hx + ey * hy);
    }
    // Patch rf electrodes: central second differences of the analytic energy.
    const double h = 1.2e-4 * std::max(r.y(), scale_);
    Eigen::Matrix3d out;
    const double u0 = energy(r);
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3d ei = Eigen::Vector3d::Zero();
        ei[i] = h;
        out(i, i) = (energy(r + ei) - 2.0 * u0 + energy(r - ei)) / (h * h);
        for (int k = i + 1; k < 3; ++k) {
            Eigen::Vector3d ek = Eigen::Vector3d::Zero();
            ek[k] = h;
            const double v = (energy(r + ei + ek) - energy(r + ei - ek) -
                              energy(r - ei + ek) + energy(r - ei - ek)) /
                             (4.0 * h * h);
            out(i, k) = out(k, i) = v;
        }
    }
    return out;
}

double PseudoModel::total_energy(const Eigen::Vector3d& r, const StaticPotential* s) const {
    double u = energy(r);
    if (s) u += species_.charge_coulomb() * s->value(r);
    return u;
}

Eigen::Vector3d PseudoModel::total_gradient(const Eigen::Vector3d& r,
                                            const StaticPotential* s) const {
    Eigen::Vector3d g = energy_gradient(r);
    if (s) g += species_.charge_coulomb() * s->gradient(r);
    return g;
}

Eigen::Matrix3d PseudoModel::total_hessian(const Eigen::Vector3d& r,
                                           const StaticPotential* s) const {
    Eigen::Matrix3d h = energy_hessian(r);
    if (s) h += species_.charge_coulomb() * s->hessian(r);
    return h;
}

// ---------------------------------------------------------------------------
// rf null search
// ---------------------------------------------------------------------------

Eigen::Vector3d find_rf_null(const PseudoModel& model, const Eigen::Vector3d& guess,
                             const NullSearchOptions& opts) {
    if (!(guess.y() > 0.0))
        throw FieldDomainError("null search guess must satisfy y > 0");
    const double rf_scale = model.rf_length_scale();
    const double tol = opts.field_tolerance > 0.0
                           ? opts.field_tolerance
                           : 1e-9 * model.drive().amplitude / rf_scale;
    // Keep the iteration near the electrodes: far above the plane |E| decays
    // below any absolute tolerance without a genuine zero.
    const double far = 20.0 * rf_scale;
    auto in_region = [&](const Eigen::Vector3d& p) {
        return p.y() > 0.0 && p.y() < far &&
               std::abs(p.x() - model.rf_center_x()) < far &&
               std::abs(p.z() - guess.z()) < far;
    };
    // Strip-only geometries are z-invariant; solve in the (x, y) plane.
    const bool planar = !model.geometry().has_patches();

    Eigen::Vector3d r = guess;
    Eigen::Vector3d f = model.rf_field(r);
    for (int it = 0; it < opts.max_iterations; ++it) {
        if (f.norm() < tol) return r;
        const Eigen::Matrix3d j = model.rf_field_jacobian(r);
        Eigen::Vector3d step;
        if (planar) {
            const Eigen::Matrix2d j2 = j.topLeftCorner<2, 2>();
            const Eigen::Vector2d s2 =
                j2.fullPivLu().solve(-f.head<2>());
            step = {s2.x(), s2.y(), 0.0};
        } else {
            step = j.fullPivLu().solve(-f);
        }
        // Backtracking on |E|^2, staying inside the search region.
        double lambda = 1.0;
        const double f2 = f.squaredNorm();
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            const Eigen::Vector3d cand = r + lambda * step;
            if (in_region(cand)) {
                const Eigen::Vector3d fc = model.rf_field(cand);
                if (fc.squaredNorm() < f2) {
                    r = cand;
                    f = fc;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!moved)
            throw SearchError("rf null search stalled (|E| = " +
                                  std::to_string(f.norm()) + " V/m)",
                              {r.x(), r.y(), r.z()});
    }
    if (f.norm() < tol) return r;
    throw SearchError("rf null search did not converge in " +
                          std::to_string(opts.max_iterations) + " iterations",
                      {r.x(), r.y(), r.z()});
}

Eigen::Vector3d default_null_guess(const PseudoModel& model) {
    const double scale = model.rf_length_scale();
    const double x0 = model.rf_center_x() - 0.75 * scale;
    const double x1 = model.rf_center_x() + 0.75 * scale;
    const int n = 61;
    Eigen::MatrixXd f2(n, n);
    auto point = [&](int ix, int iy) {
        return Eigen::Vector3d(x0 + (x1 - x0) * ix / (n - 1),
                               1.5 * scale * (iy + 1) / n, 0.0);
    };
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            f2(ix, iy) = model.rf_field(point(ix, iy)).squaredNorm();

    // Prefer an interior local minimum of |E|^2: the field also decays far
    // from the electrodes, but without a zero, so plain minimisation would
    // drift to the box edge.
    Eigen::Vector3d best = point(n / 2, n / 2);
    double best_f = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int ix = 1; ix + 1 < n; ++ix) {
        for (int iy = 1; iy + 1 < n; ++iy) {
            const double v = f2(ix, iy);
            if (v <= f2(ix - 1, iy) && v <= f2(ix + 1, iy) && v <= f2(ix, iy - 1) &&
                v <= f2(ix, iy + 1) && v < best_f) {
                best_f = v;
                best = point(ix, iy);
                found = true;
            }
        }
    }
    if (found) return best;
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            if (f2(ix, iy) < best_f) {
                best_f = f2(ix, iy);
                best = point(ix, iy);
            }
    return best;
}

// ---------------------------------------------------------------------------
// Equilibrium of the total effective energy
// ---------------------------------------------------------------------------

Eigen::Vector3d find_equilibrium(const PseudoModel& model, const StaticPotential& s,
                                 const Eigen::Vector3d& guess) {
    const double scale = model.length_scale();
    const double a = model.drive().amplitude;
    const double u_char = model.energy(guess) +
                          std::abs(model.species().charge_coulomb()) * a;
    const double gtol = 1e-12 * std::max(u_char, 1e-30) / scale;

    Eigen::Vector3d r = guess;
    double u = model.total_energy(r, &s);
    for (int it = 0; it < 200; ++it) {
        const Eigen::Vector3d grad = model.total_gradient(r, &s);
        if (grad.norm() < gtol) return r;
        Eigen::Matrix3d h = model.total_hessian(r, &s);
        // Levenberg shift until the step is a descent direction.
        double mu = 0.0;
        Eigen::Vector3d step;
        for (int k = 0; k < 60; ++k) {
            const Eigen::Matrix3d hs = h + mu * Eigen::Matrix3d::Identity();
            Eigen::LDLT<Eigen::Matrix3d> ldlt(hs);
            if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                step = ldlt.solve(-grad);
                break;
            }
            mu = (mu == 0.0) ? 1e-6 * h.norm() : 10.0 * mu;
        }
        double lambda = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            const Eigen::Vector3d cand = r + lambda * step;
            if (cand.y() > 0.0) {
                const double uc = model.total_energy(cand, &s);
                if (uc < u) {
                    r = cand;
                    u = uc;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!moved) {
            if (grad.norm() < 1e4 * gtol) return r;
            throw SearchError("equilibrium search stalled", {r.x(), r.y(), r.z()});
        }
    }
    throw SearchError("equilibrium search did not converge", {r.x(), r.y(), r.z()});
}

// ---------------------------------------------------------------------------
// Secular modes
// ---------------------------------------------------------------------------

namespace {

constexpr double kDegeneracyTol = 1e-6;  // relative frequency difference

ModeSolution decompose_hessian(const Eigen::Matrix3d& h, const Eigen::Vector3d& at,
                               double mass) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    const Eigen::Vector3d lam = es.eigenvalues();
    const double lam_scale = lam.cwiseAbs().maxCoeff();
    const double zero_tol = 1e-9 * std::max(lam_scale, 1e-300);

    for (int i = 0; i < 3; ++i) {
        if (lam[i] < -zero_tol) {
            const Eigen::Vector3d dir = es.eigenvectors().col(i);
            throw UnstableEquilibriumError(
                "equilibrium is unstable along direction (" + std::to_string(dir.x()) +
                ", " + std::to_string(dir.y()) + ", " + std::to_string(dir.z()) + ")");
        }
    }

    ModeSolution out;
    out.equilibrium = at;
    out.axes = es.eigenvectors();
    out.frequencies.resize(3);
    out.degenerate.assign(3, false);
    out.unconfined.assign(3, false);
    out.angle_to_normal.resize(3);
    for (int i = 0; i < 3; ++i) {
        const double l = std::abs(lam[i]) <= zero_tol ? 0.0 : lam[i];
        out.frequencies[i] = std::sqrt(std::max(l, 0.0) / mass);
        out.unconfined[i] = (l == 0.0);
        const double c = std::min(1.0, std::abs(out.axes.col(i).y()));
        out.angle_to_normal[i] = std::acos(c);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (out.unconfined[i] || out.unconfined[j]) continue;
            const double wmax = std::max(out.frequencies[i], out.frequencies[j]);
            if (std::abs(out.frequencies[i] - out.frequencies[j]) <=
                kDegeneracyTol * wmax) {
                out.degenerate[i] = out.degenerate[j] = true;
            }
        }
    }
    // Rotation of the most-vertical confined axis away from the normal.
    double best = std::numbers::pi;
    for (int i = 0; i < 3; ++i) {
        if (!out.unconfined[i]) best = std::min(best, out.angle_to_normal[i]);
    }
    out.axis_rotation = (best == std::numbers::pi) ? 0.0 : best;
    return out;
}

}  // namespace

ModeSolution secular_modes(const PseudoModel& model, const Eigen::Vector3d& equilibrium,
                           const StaticPotential* statics) {
    const Eigen::Matrix3d h = model.total_hessian(equilibrium, statics);
    return decompose_hessian(h, equilibrium, model.species().mass_kg());
}

double quadrupole_radial_frequency(const QuadrupoleTrapModel& model) {
    if (!(model.R > 0.0) || !(model.V0 > 0.0) || !(model.omega_rf > 0.0))
        throw ValidationError("quadrupole model requires positive R, V0, omega_rf");
    const double q = std::abs(model.species.charge_coulomb());
    return q * model.V0 /
           (std::numbers::sqrt2 * model.species.mass_kg() * model.omega_rf *
            model.R * model.R);
}

// ---------------------------------------------------------------------------
// Trap depth
// ---------------------------------------------------------------------------

namespace {

// Golden-section maximisation of a 1D function on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
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

// Damped Newton solve of grad U = 0 (stationary point, any index).
bool refine_stationary(const PseudoModel& model, Eigen::Vector3d& r, bool planar,
                       double gtol) {
    Eigen::Vector3d g = model.energy_gradient(r);
    for (int it = 0; it < 100; ++it) {
        if (g.norm() < gtol) return true;
        const Eigen::Matrix3d h = model.energy_hessian(r);
        Eigen::Vector3d step;
        if (planar) {
            const Eigen::Vector2d s2 =
                h.topLeftCorner<2, 2>().fullPivLu().solve(-g.head<2>());
            step = {s2.x(), s2.y(), 0.0};
        } else {
            step = h.fullPivLu().solve(-g);
        }
        double lambda = 1.0;
        bool moved = false;
        const double g2 = g.squaredNorm();
        for (int bt = 0; bt < 40; ++bt) {
            const Eigen::Vector3d cand = r + lambda * step;
            if (cand.y() > 0.0) {
                const Eigen::Vector3d gc = model.energy_gradient(cand);
                if (gc.squaredNorm() < g2) {
                    r = cand;
                    g = gc;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!moved) return g.norm() < gtol * 1e3;
    }
    return g.norm() < gtol;
}

}  // namespace

TrapDepthResult trap_depth(const PseudoModel& model, const Eigen::Vector3d& null,
                           const DepthSearchOptions& opts) {
    const double h0 = null.y();
    if (!(h0 > 0.0)) throw FieldDomainError("trap null must lie at y > 0");
    const double box = opts.box_factor * h0;
    const double u_null = model.energy(null);
    const bool planar = !model.geometry().has_patches();
    const double u_scale =
        model.energy(null + Eigen::Vector3d(0.0, 0.5 * h0, 0.0)) - u_null;
    const double gtol = 1e-11 * std::max(u_scale, 1e-30) / h0;

    TrapDepthResult result;
    result.search_box_lo = null - Eigen::Vector3d(box, h0 - h0 * 1e-6, box);
    result.search_box_hi = null + Eigen::Vector3d(box, box, box);

    auto try_candidate = [&](Eigen::Vector3d cand) -> bool {
        if (!refine_stationary(model, cand, planar, gtol)) return false;
        if (!(cand.y() > 0.0)) return false;
        const Eigen::Matrix3d hess = model.energy_hessian(cand);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(hess);
        const double tol = 1e-9 * es.eigenvalues().cwiseAbs().maxCoeff();
        int negatives = 0;
        int neg_index = -1;
        for (int i = 0; i < 3; ++i) {
            if (es.eigenvalues()[i] < -tol) {
                ++negatives;
                neg_index = i;
            }
        }
        if (negatives != 1) return false;
        const double depth = model.energy(cand) - u_null;
        if (!(depth > 0.0)) return false;
        result.saddle = cand;
        result.depth_ev = depth / ev;
        result.escape_direction = es.eigenvectors().col(neg_index);
        return true;
    };

    // Pass 1: first maximum of U along the vertical ray above the null.
    {
        const int n = opts.ray_samples;
        double prev = u_null;
        double t_prev = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double t = (box - h0 * 1e-3) * i / n + h0 * 1e-3;
            const double u = model.energy(null + Eigen::Vector3d(0.0, t, 0.0));
            if (i > 1 && u < prev) {
                const double t_max = golden_max(
                    [&](double tt) {
                        return model.energy(null + Eigen::Vector3d(0.0, tt, 0.0));
                    },
                    t_prev, t, 1e-12 * box);
                if (try_candidate(null + Eigen::Vector3d(0.0, t_max, 0.0)))
                    return result;
                break;
            }
            t_prev = t;
            prev = u;
        }
    }

    // Pass 2: ray fan in the x-y plane; the escape saddle is the smallest of
    // the per-ray maxima.
    double best_val = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_point = null;
    bool found = false;
    for (int k = 0; k < opts.ray_count; ++k) {
        const double ang = std::numbers::pi * (k + 0.5) / opts.ray_count;
        const Eigen::Vector3d dir(std::cos(ang), std::sin(ang), 0.0);
        double prev = u_null;
        double t_prev = 0.0;
        for (int i = 1; i <= opts.ray_samples; ++i) {
            const double t = box * i / opts.ray_samples;
            const Eigen::Vector3d p = null + t * dir;
            if (!(p.y() > 0.0)) break;
            const double u = model.energy(p);
            if (i > 1 && u < prev) {
                if (prev < best_val) {
                    best_val = prev;
                    best_point = null + t_prev * dir;
                    found = true;
                }
                break;
            }
            t_prev = t;
            prev = u;
        }
    }
    if (found && try_candidate(best_point)) return result;
    throw SearchError("no escape saddle found within the search box",
                      {best_point.x(), best_point.y(), best_point.z()});
}

ModeSolution intrinsic_axes(const PseudoModel& model, double control_offset) {
    const Eigen::Vector3d null = find_rf_null(model, default_null_guess(model));
    const StaticPotential s =
        StaticPotential::intrinsic_offset(model.geometry(), control_offset);
    const Eigen::Vector3d eq =
        control_offset == 0.0 ? null : find_equilibrium(model, s, null);
    return secular_modes(model, eq, &s);
}

CoolingReport cooling_geometry_check(const ModeSolution& modes,
                                     const Eigen::Vector3d& beam_direction,
                                     double overlap_threshold) {
    if (std::abs(beam_direction.norm() - 1.0) > 1e-9)
        throw ValidationError("beam direction must be a unit vector");
    CoolingReport report;
    report.beam = beam_direction;
    const std::size_t n = modes.frequencies.size();
    report.overlaps.resize(n);
    report.low_overlap.assign(n, false);
    report.degenerate_risk.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        report.overlaps[i] =
            std::abs(modes.axes.col(static_cast<int>(i)).dot(beam_direction));
        if (!modes.unconfined[i] && report.overlaps[i] < overlap_threshold)
            report.low_overlap[i] = true;
        if (modes.degenerate[i]) report.degenerate_risk[i] = true;
        if (report.low_overlap[i] || report.degenerate_risk[i]) report.ok = false;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Grid export
// ---------------------------------------------------------------------------

void write_pseudopotential_grid(std::ostream& os, const PseudoModel& model,
                                const GridSpec& spec,
                                const std::vector<GridAnnotation>& annotations) {
    if (spec.nx < 1 || spec.ny < 1)
        throw ValidationError("grid resolution must be >= 1");
    if (!(spec.y0 > 0.0) || !(spec.y1 > 0.0))
        throw FieldDomainError("grid region must lie in the y > 0 half-space");
    os << "x_m,y_m,z_m,pseudopotential_eV,annotation\n";
    os.precision(12);
    for (int iy = 0; iy < spec.ny; ++iy) {
        const double y = spec.ny == 1
                             ? spec.y0
                             : spec.y0 + (spec.y1 - spec.y0) * iy / (spec.ny - 1);
        for (int ix = 0; ix < spec.nx; ++ix) {
            const double x = spec.nx == 1
                                 ? spec.x0
                                 : spec.x0 + (spec.x1 - spec.x0) * ix / (spec.nx - 1);
            const Eigen::Vector3d r(x, y, spec.z);
            os << x << ',' << y << ',' << spec.z << ',' << model.potential_ev(r)
               << ",\n";
        }
    }
    for (const auto& a : annotations) {
        os << a.point.x() << ',' << a.point.y() << ',' << a.point.z() << ','
           << model.potential_ev(a.point) << ',' << a.tag << '\n';
    }
}

}  // namespace iontrap

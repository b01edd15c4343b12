// SPDX-License-Identifier: Apache-2.0
//
// Closed-form solutions for biased regions in a grounded plane.
//
// Strips: the potential of a strip a < x < b held at U in the y > 0 half
// space is U/pi times a difference of arctangents; all derivatives follow
// from the complex potential F(w), w = x + i*y, with phi = Im F:
//   finite strip:  F(w) = (U/pi) * log((w - b)/(w - a))
//   a = -inf:      F(w) = (U/pi) * log(w - b)
//   b = +inf:      F(w) = i*U - (U/pi) * log(w - a)
//
// Patches: the potential is U * Omega / (2*pi) with Omega the solid angle of
// the rectangle; the field is the perimeter line integral
//   E = -(U/2pi) * sum_segments (A x B)(|A|+|B|) / (|A||B|(|A||B| + A.B))
// with A, B the vectors from the evaluation point to the segment endpoints.

#include "iontrap/surface_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace iontrap {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

void require_half_space(double y) {
    if (!(y > 0.0))
        throw FieldDomainError("evaluation requires y > 0 (trapping half-space)");
}

// Unit-bias strip potential, three-branch arctangent form.
double unit_strip_potential(double a, double b, double x, double y) {
    if (std::isinf(a) && std::isinf(b))
        throw ValidationError("strip cannot be infinite on both edges");
    if (std::isinf(a))
        return (0.5 * pi - std::atan((x - b) / y)) / pi;
    if (std::isinf(b))
        return (0.5 * pi + std::atan((x - a) / y)) / pi;
    return (std::atan((x - a) / y) - std::atan((x - b) / y)) / pi;
}

StripComplexDerivs unit_strip_derivs(double a, double b, double x, double y) {
    const std::complex<double> w(x, y);
    StripComplexDerivs d{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    if (std::isfinite(b)) {
        const std::complex<double> rb = 1.0 / (w - b);
        d.d1 += rb / pi;
        d.d2 -= rb * rb / pi;
        d.d3 += 2.0 * rb * rb * rb / pi;
    }
    if (std::isfinite(a)) {
        const std::complex<double> ra = 1.0 / (w - a);
        d.d1 -= ra / pi;
        d.d2 += ra * ra / pi;
        d.d3 -= 2.0 * ra * ra * ra / pi;
    }
    return d;
}

void validate_strip(const Strip& s) {
    if (std::isinf(s.a) && std::isinf(s.b))
        throw ValidationError("strip '" + s.label + "': both edges infinite");
    if (!(s.a < s.b))
        throw ValidationError("strip '" + s.label + "': requires a < b");
    if (std::isnan(s.a) || std::isnan(s.b))
        throw ValidationError("strip '" + s.label + "': edge is NaN");
    if (!(s.rf_phase >= 0.0) || s.rf_phase >= 2.0 * pi)
        throw ValidationError("strip '" + s.label + "': rf_phase outside [0, 2*pi)");
}

void validate_patch(const RectPatch& p) {
    if (!std::isfinite(p.x0) || !std::isfinite(p.x1) || !std::isfinite(p.z0) ||
        !std::isfinite(p.z1))
        throw ValidationError("patch '" + p.label + "': extents must be finite");
    if (!(p.x0 < p.x1) || !(p.z0 < p.z1))
        throw ValidationError("patch '" + p.label + "': empty or inverted extents");
    if (!(p.rf_phase >= 0.0) || p.rf_phase >= 2.0 * pi)
        throw ValidationError("patch '" + p.label + "': rf_phase outside [0, 2*pi)");
}

// Open-interval overlap; touching edges are allowed (gapless electrodes).
bool intervals_overlap(double a0, double a1, double b0, double b1) {
    return a0 < b1 && b0 < a1;
}

}  // namespace

double strip_potential(const Strip& strip, double x, double y) {
    require_half_space(y);
    return strip.bias * unit_strip_potential(strip.a, strip.b, x, y);
}

StripComplexDerivs strip_complex_derivs(const Strip& strip, double x, double y) {
    require_half_space(y);
    return unit_strip_derivs(strip.a, strip.b, x, y);
}

Eigen::Vector2d strip_field(const Strip& strip, double x, double y) {
    const auto d = strip_complex_derivs(strip, x, y);
    // E = -grad(phi), phi = bias * Im F.
    return {-strip.bias * d.d1.imag(), -strip.bias * d.d1.real()};
}

Eigen::Matrix2d strip_hessian(const Strip& strip, double x, double y) {
    const auto d = strip_complex_derivs(strip, x, y);
    Eigen::Matrix2d h;
    const double im = strip.bias * d.d2.imag();
    const double re = strip.bias * d.d2.real();
    h << im, re, re, -im;
    return h;
}

double rect_patch_potential(const RectPatch& patch, const Eigen::Vector3d& r) {
    require_half_space(r.y());
    const double y = r.y();
    const double u[2] = {patch.x0 - r.x(), patch.x1 - r.x()};
    const double w[2] = {patch.z0 - r.z(), patch.z1 - r.z()};
    double omega = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            const double rij = std::sqrt(u[i] * u[i] + y * y + w[j] * w[j]);
            omega += sign * std::atan2(u[i] * w[j], y * rij);
        }
    }
    return patch.bias * omega / (2.0 * pi);
}

Eigen::Vector3d rect_patch_field(const RectPatch& patch, const Eigen::Vector3d& r) {
    require_half_space(r.y());
    const Eigen::Vector3d corners[4] = {
        {patch.x0, 0.0, patch.z0},
        {patch.x1, 0.0, patch.z0},
        {patch.x1, 0.0, patch.z1},
        {patch.x0, 0.0, patch.z1},
    };
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int s = 0; s < 4; ++s) {
        const Eigen::Vector3d a = corners[s] - r;
        const Eigen::Vector3d b = corners[(s + 1) % 4] - r;
        const double na = a.norm();
        const double nb = b.norm();
        sum += a.cross(b) * (na + nb) / (na * nb * (na * nb + a.dot(b)));
    }
    return -(patch.bias / (2.0 * pi)) * sum;
}

Eigen::Matrix3d rect_patch_hessian(const RectPatch& patch, const Eigen::Vector3d& r) {
    require_half_space(r.y());
    const double diag = std::hypot(patch.x1 - patch.x0, patch.z1 - patch.z0);
    const double scale = std::max(r.y(), 0.125 * diag);
    const double h = 6.0e-6 * scale;

    // Jacobian of E by Richardson-extrapolated central differences; the
    // Hessian of the potential is -J, symmetrized.
    Eigen::Matrix3d jac;
    for (int j = 0; j < 3; ++j) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[j] = 1.0;
        const Eigen::Vector3d d1 =
            (rect_patch_field(patch, r + h * e) - rect_patch_field(patch, r - h * e)) /
            (2.0 * h);
        const Eigen::Vector3d d2 = (rect_patch_field(patch, r + 0.5 * h * e) -
                                    rect_patch_field(patch, r - 0.5 * h * e)) /
                                   h;
        jac.col(j) = (4.0 * d2 - d1) / 3.0;
    }
    const Eigen::Matrix3d h_pot = -0.5 * (jac + jac.transpose());
    return h_pot;
}

// ---------------------------------------------------------------------------
// PlanarGeometry
// ---------------------------------------------------------------------------

void PlanarGeometry::add_strip(Strip s) {
    validate_strip(s);
    for (const auto& other : strips_) {
        if (intervals_overlap(s.a, s.b, other.a, other.b))
            throw ValidationError("strip '" + s.label + "' overlaps strip '" +
                                  other.label + "'");
    }
    for (const auto& p : patches_) {
        if (intervals_overlap(s.a, s.b, p.x0, p.x1))
            throw ValidationError("strip '" + s.label + "' overlaps patch '" +
                                  p.label + "'");
    }
    strips_.push_back(std::move(s));
}

void PlanarGeometry::add_patch(RectPatch p) {
    validate_patch(p);
    for (const auto& s : strips_) {
        if (intervals_overlap(p.x0, p.x1, s.a, s.b))
            throw ValidationError("patch '" + p.label + "' overlaps strip '" +
                                  s.label + "'");
    }
    for (const auto& other : patches_) {
        if (intervals_overlap(p.x0, p.x1, other.x0, other.x1) &&
            intervals_overlap(p.z0, p.z1, other.z0, other.z1))
            throw ValidationError("patch '" + p.label + "' overlaps patch '" +
                                  other.label + "'");
    }
    patches_.push_back(std::move(p));
}

std::vector<std::string> PlanarGeometry::labels() const {
    std::vector<std::string> out;
    out.reserve(electrode_count());
    for (const auto& s : strips_) out.push_back(s.label);
    for (const auto& p : patches_) out.push_back(p.label);
    return out;
}

std::vector<std::size_t> PlanarGeometry::rf_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < electrode_count(); ++e)
        if (role_of(e) == ElectrodeRole::rf) out.push_back(e);
    return out;
}

std::vector<std::size_t> PlanarGeometry::control_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < electrode_count(); ++e)
        if (role_of(e) == ElectrodeRole::control) out.push_back(e);
    return out;
}

ElectrodeRole PlanarGeometry::role_of(std::size_t e) const {
    return e < strips_.size() ? strips_[e].role : patches_[e - strips_.size()].role;
}

const std::string& PlanarGeometry::label_of(std::size_t e) const {
    return e < strips_.size() ? strips_[e].label : patches_[e - strips_.size()].label;
}

double PlanarGeometry::rf_phase_of(std::size_t e) const {
    return e < strips_.size() ? strips_[e].rf_phase
                              : patches_[e - strips_.size()].rf_phase;
}

double PlanarGeometry::bias_of(std::size_t e) const {
    return e < strips_.size() ? strips_[e].bias : patches_[e - strips_.size()].bias;
}

double PlanarGeometry::length_scale() const {
    double lo = inf, hi = -inf;
    auto feed = [&](double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    };
    for (const auto& s : strips_) {
        feed(s.a);
        feed(s.b);
    }
    for (const auto& p : patches_) {
        feed(p.x0);
        feed(p.x1);
        feed(p.z0);
        feed(p.z1);
    }
    if (!(hi > lo)) {
        // Degenerate (e.g. a single semi-infinite strip): fall back to the
        // magnitude of whatever finite coordinate exists.
        const double mag = std::isfinite(lo) ? std::abs(lo) : 0.0;
        return mag > 0.0 ? mag : 1e-6;
    }
    return hi - lo;
}

PlanarGeometry PlanarGeometry::translated(double dx, double dz) const {
    PlanarGeometry out;
    for (auto s : strips_) {
        if (std::isfinite(s.a)) s.a += dx;
        if (std::isfinite(s.b)) s.b += dx;
        out.add_strip(std::move(s));
    }
    for (auto p : patches_) {
        p.x0 += dx;
        p.x1 += dx;
        p.z0 += dz;
        p.z1 += dz;
        out.add_patch(std::move(p));
    }
    return out;
}

double PlanarGeometry::unit_potential(std::size_t e, const Eigen::Vector3d& r) const {
    require_half_space(r.y());
    if (e < strips_.size())
        return unit_strip_potential(strips_[e].a, strips_[e].b, r.x(), r.y());
    RectPatch p = patches_[e - strips_.size()];
    p.bias = 1.0;
    return rect_patch_potential(p, r);
}

Eigen::Vector3d PlanarGeometry::unit_field(std::size_t e, const Eigen::Vector3d& r) const {
    require_half_space(r.y());
    if (e < strips_.size()) {
        const auto d = unit_strip_derivs(strips_[e].a, strips_[e].b, r.x(), r.y());
        return {-d.d1.imag(), -d.d1.real(), 0.0};
    }
    RectPatch p = patches_[e - strips_.size()];
    p.bias = 1.0;
    return rect_patch_field(p, r);
}

Eigen::Matrix3d PlanarGeometry::unit_hessian(std::size_t e, const Eigen::Vector3d& r) const {
    require_half_space(r.y());
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    if (e < strips_.size()) {
        const auto d = unit_strip_derivs(strips_[e].a, strips_[e].b, r.x(), r.y());
        h(0, 0) = d.d2.imag();
        h(0, 1) = h(1, 0) = d.d2.real();
        h(1, 1) = -d.d2.imag();
        return h;
    }
    RectPatch p = patches_[e - strips_.size()];
    p.bias = 1.0;
    return rect_patch_hessian(p, r);
}

double geometry_potential(const PlanarGeometry& g, const Eigen::VectorXd& biases,
                          const Eigen::Vector3d& r) {
    if (static_cast<std::size_t>(biases.size()) != g.electrode_count())
        throw ValidationError("bias vector length does not match electrode count");
    double phi = 0.0;
    for (std::size_t e = 0; e < g.electrode_count(); ++e) {
        if (biases[static_cast<Eigen::Index>(e)] != 0.0)
            phi += biases[static_cast<Eigen::Index>(e)] * g.unit_potential(e, r);
    }
    return phi;
}

Eigen::Vector3d geometry_field(const PlanarGeometry& g, const Eigen::VectorXd& biases,
                               const Eigen::Vector3d& r) {
    if (static_cast<std::size_t>(biases.size()) != g.electrode_count())
        throw ValidationError("bias vector length does not match electrode count");
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    for (std::size_t e = 0; e < g.electrode_count(); ++e) {
        if (biases[static_cast<Eigen::Index>(e)] != 0.0)
            f += biases[static_cast<Eigen::Index>(e)] * g.unit_field(e, r);
    }
    return f;
}

PlanarGeometry four_wire(double d) {
    if (!(d > 0.0) || !std::isfinite(d))
        throw ValidationError("four_wire: d must be positive");
    PlanarGeometry g;
    g.add_strip({-d, 0.0, ElectrodeRole::rf, 0.0, 0.0, "rf_inner"});
    g.add_strip({d, inf, ElectrodeRole::rf, 0.0, 0.0, "rf_outer"});
    return g;
}

PlanarGeometry five_wire(double d) {
    if (!(d > 0.0) || !std::isfinite(d))
        throw ValidationError("five_wire: d must be positive");
    PlanarGeometry g;
    g.add_strip({-1.5 * d, -0.5 * d, ElectrodeRole::rf, 0.0, 0.0, "rf_left"});
    g.add_strip({0.5 * d, 1.5 * d, ElectrodeRole::rf, 0.0, 0.0, "rf_right"});
    return g;
}

}  // namespace iontrap

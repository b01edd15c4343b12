// SPDX-License-Identifier: Apache-2.0
//
// core.hpp -- physical constants, ion species, frequency conversions and the
// error types shared by the whole toolkit.  All internal computation is SI;
// reporting layers convert to MHz / um / meV as needed.

#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace iontrap {

// ---------------------------------------------------------------------------
// Errors.  Everything thrown by the library derives from iontrap::Error so a
// front end can map "physics failed" vs "bad usage" onto exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad argument values (non-positive mass, mismatched vector length, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

// Unknown species label or electrode name.
class LookupError : public Error {
  public:
    using Error::Error;
};

// Evaluation outside the valid domain (e.g. y <= 0 for a surface trap).
class FieldDomainError : public Error {
  public:
    using Error::Error;
};

// Iterative search failed to converge; carries the best iterate found.
class SearchError : public Error {
  public:
    SearchError(const std::string& msg, std::array<double, 3> best)
        : Error(msg), best_iterate(best) {}
    std::array<double, 3> best_iterate{};
};

// Equilibrium has a negative curvature direction.
class UnstableEquilibriumError : public Error {
  public:
    using Error::Error;
};

// Trajectory too short to resolve the requested spectral feature.
class ResolutionError : public Error {
  public:
    ResolutionError(const std::string& msg, double required_duration_s)
        : Error(msg), required_duration(required_duration_s) {}
    double required_duration = 0.0;  // s
};

// Input falls in a parameter region the model does not define.
class UnsupportedRegimeError : public Error {
  public:
    using Error::Error;
};

// Optimizer did not converge.
class OptimizationError : public Error {
  public:
    using Error::Error;
};

// Constrained solve cannot meet its targets; carries the best residual.
class InfeasibleError : public Error {
  public:
    InfeasibleError(const std::string& msg, double residual)
        : Error(msg), best_residual(residual) {}
    double best_residual = 0.0;
};

// Basis columns are (numerically) redundant.
class DegenerateBasisError : public Error {
  public:
    using Error::Error;
};

// Fit has no information content.
class DegenerateFitError : public Error {
  public:
    using Error::Error;
};

// Ion left the trapping region during integration.
class EscapeError : public Error {
  public:
    EscapeError(const std::string& msg, double t_exit)
        : Error(msg), exit_time(t_exit) {}
    double exit_time = 0.0;  // s
};

// Structured-text input could not be parsed; line is 1-based.
class ParseError : public Error {
  public:
    ParseError(const std::string& msg, int line_number)
        : Error(msg), line(line_number) {}
    int line = 0;
};

// ---------------------------------------------------------------------------
// Physical constants (CODATA 2018).
// ---------------------------------------------------------------------------

namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;   // C (exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double speed_of_light = 299792458.0;          // m/s (exact)
inline constexpr double boltzmann = 1.380649e-23;              // J/K (exact)
}  // namespace constants

// ---------------------------------------------------------------------------
// Ion species.  Masses from labels use integer mass numbers (24 u for 24Mg+);
// exact isotopic masses can be registered through from_mass().
// ---------------------------------------------------------------------------

class IonSpecies {
  public:
    // Parse labels of the form "<mass number><element symbol><charges>",
    // e.g. "24Mg+", "9Be+", "138Ba+", "40Ca++".  Throws LookupError for
    // anything that does not match a known element symbol.
    static IonSpecies from_label(const std::string& label);

    // Explicit species; mass in atomic mass units, charge in units of e.
    static IonSpecies from_mass(double mass_u, int charge,
                                const std::string& label = "custom");

    double mass_kg() const { return mass_kg_; }
    int charge() const { return charge_; }  // signed, units of e
    double charge_coulomb() const {
        return charge_ * constants::elementary_charge;
    }
    const std::string& label() const { return label_; }

  private:
    IonSpecies(double mass_kg, int charge, std::string label)
        : mass_kg_(mass_kg), charge_(charge), label_(std::move(label)) {}

    double mass_kg_;
    int charge_;
    std::string label_;
};

// ---------------------------------------------------------------------------
// Frequency.  Stores both representations so that conversions round-trip
// bit exactly regardless of which unit the value entered in.
// ---------------------------------------------------------------------------

double angular_from_hz(double cyclic_hz);   // 2*pi*f
double hz_from_angular(double angular);     // w / (2*pi)

class Frequency {
  public:
    static Frequency from_hz(double cyclic_hz);
    static Frequency from_angular(double rad_per_s);

    double hz() const { return hz_; }
    double angular() const { return angular_; }

  private:
    Frequency(double hz, double angular) : hz_(hz), angular_(angular) {}
    double hz_;
    double angular_;
};

}  // namespace iontrap

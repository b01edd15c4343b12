// SPDX-License-Identifier: Apache-2.0

#include "iontrap/core.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

namespace iontrap {

namespace {

const std::set<std::string>& known_elements() {
    // Symbols of species commonly held in rf traps, plus their neighbours.
    static const std::set<std::string> table = {
        "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "Na", "Mg",
        "Al", "Si", "K",  "Ca", "Zn", "Ga", "Rb", "Sr", "Cd", "In",
        "Cs", "Ba", "Lu", "Yb", "Hg", "Tl", "Ra", "Th", "Ar", "Xe"};
    return table;
}

}  // namespace

IonSpecies IonSpecies::from_label(const std::string& label) {
    std::size_t i = 0;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) ++i;
    if (i == 0)
        throw LookupError("species label '" + label + "': missing mass number");
    const int mass_number = std::stoi(label.substr(0, i));

    std::size_t j = i;
    while (j < label.size() && std::isalpha(static_cast<unsigned char>(label[j]))) ++j;
    const std::string element = label.substr(i, j - i);
    if (!known_elements().count(element))
        throw LookupError("species label '" + label + "': unknown element '" +
                          element + "'");

    int charge = 0;
    for (; j < label.size(); ++j) {
        if (label[j] == '+')
            ++charge;
        else if (label[j] == '-')
            --charge;
        else
            throw LookupError("species label '" + label +
                              "': unexpected character '" + label[j] + "'");
    }
    if (charge == 0)
        throw LookupError("species label '" + label + "': missing charge sign");

    return from_mass(static_cast<double>(mass_number), charge, label);
}

IonSpecies IonSpecies::from_mass(double mass_u, int charge,
                                 const std::string& label) {
    if (!(mass_u > 0.0) || !std::isfinite(mass_u))
        throw ValidationError("ion mass must be positive and finite");
    if (charge == 0)
        throw ValidationError("ion charge must be nonzero");
    return IonSpecies(mass_u * constants::atomic_mass_unit, charge, label);
}

double angular_from_hz(double cyclic_hz) {
    return 2.0 * std::numbers::pi * cyclic_hz;
}

double hz_from_angular(double angular) {
    return angular / (2.0 * std::numbers::pi);
}

Frequency Frequency::from_hz(double cyclic_hz) {
    if (!(cyclic_hz >= 0.0) || !std::isfinite(cyclic_hz))
        throw ValidationError("frequency must be finite and >= 0");
    return Frequency(cyclic_hz, angular_from_hz(cyclic_hz));
}

Frequency Frequency::from_angular(double rad_per_s) {
    if (!(rad_per_s >= 0.0) || !std::isfinite(rad_per_s))
        throw ValidationError("frequency must be finite and >= 0");
    return Frequency(hz_from_angular(rad_per_s), rad_per_s);
}

}  // namespace iontrap

// SPDX-License-Identifier: Apache-2.0
//
// geometry_io.hpp -- the structured-text geometry format.
//
//   # comment
//   format_version 1
//   units um V
//   electrode label=rf_inner role=rf x=-40:0 z=infinite bias=driven rf_phase=0
//   electrode label=c1 role=control x=60:160 z=-500:-300 bias=0.5
//
// One electrode per line as key=value pairs.  z=infinite declares a strip,
// a finite z-range declares a rectangular patch.  x edges may be -inf/inf
// (strips only, at most one).  rf electrodes are externally driven, so their
// bias is "driven" (or omitted); control electrodes take a numeric bias.
// rf_phase is in radians unless suffixed "deg".  The units header declares
// the length unit (um, mm or m) and the potential unit (V); defaults are
// micrometres and volts.

#pragma once

#include <iosfwd>
#include <string>

#include "iontrap/surface_fields.hpp"

namespace iontrap {

PlanarGeometry read_geometry(std::istream& is);
PlanarGeometry read_geometry_file(const std::string& path);

// Serialises in the same format (always metres scaled back to the given
// length unit).
void write_geometry(std::ostream& os, const PlanarGeometry& g,
                    const std::string& length_unit = "um");

// Write-then-rename so partially written output never replaces a good file.
void write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace iontrap

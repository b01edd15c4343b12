// SPDX-License-Identifier: Apache-2.0

#include "iontrap/geometry_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace iontrap {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double length_unit_scale(const std::string& unit, int line) {
    if (unit == "um") return 1e-6;
    if (unit == "mm") return 1e-3;
    if (unit == "m") return 1.0;
    throw ParseError("unknown length unit '" + unit + "' (use um, mm or m)", line);
}

double parse_number(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + tok + "'", line);
    }
}

double parse_edge(const std::string& tok, int line) {
    if (tok == "inf" || tok == "+inf") return inf;
    if (tok == "-inf") return -inf;
    return parse_number(tok, line);
}

std::map<std::string, std::string> parse_pairs(std::istringstream& ss, int line) {
    std::map<std::string, std::string> kv;
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value, got '" + tok + "'", line);
        const std::string key = tok.substr(0, eq);
        if (kv.count(key)) throw ParseError("duplicate key '" + key + "'", line);
        kv[key] = tok.substr(eq + 1);
    }
    return kv;
}

}  // namespace

PlanarGeometry read_geometry(std::istream& is) {
    PlanarGeometry g;
    std::string line;
    int line_no = 0;
    bool version_seen = false;
    double scale = 1e-6;  // default micrometres
    bool any_electrode = false;

    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;

        if (word == "format_version") {
            int v = 0;
            if (!(ss >> v)) throw ParseError("format_version needs an integer", line_no);
            if (v != 1)
                throw ParseError("unsupported format_version " + std::to_string(v),
                                 line_no);
            version_seen = true;
            continue;
        }
        if (word == "units") {
            std::string lu, vu;
            if (!(ss >> lu >> vu)) throw ParseError("units needs two tokens", line_no);
            scale = length_unit_scale(lu, line_no);
            if (vu != "V") throw ParseError("only volts are supported", line_no);
            continue;
        }
        if (word != "electrode")
            throw ParseError("unknown directive '" + word + "'", line_no);
        if (!version_seen)
            throw ParseError("format_version must appear before electrodes", line_no);

        auto kv = parse_pairs(ss, line_no);
        auto need = [&](const char* key) -> std::string {
            auto it = kv.find(key);
            if (it == kv.end())
                throw ParseError(std::string("missing '") + key + "'", line_no);
            return it->second;
        };

        const std::string label = need("label");
        const std::string role_s = need("role");
        ElectrodeRole role;
        if (role_s == "rf")
            role = ElectrodeRole::rf;
        else if (role_s == "control")
            role = ElectrodeRole::control;
        else
            throw ParseError("role must be rf or control", line_no);

        const std::string xr = need("x");
        const auto colon = xr.find(':');
        if (colon == std::string::npos)
            throw ParseError("x range must be lo:hi", line_no);
        const double xa = parse_edge(xr.substr(0, colon), line_no);
        const double xb = parse_edge(xr.substr(colon + 1), line_no);

        double bias = 0.0;
        if (auto it = kv.find("bias"); it != kv.end()) {
            if (it->second == "driven") {
                if (role != ElectrodeRole::rf)
                    throw ParseError("only rf electrodes are 'driven'", line_no);
            } else {
                if (role == ElectrodeRole::rf)
                    throw ParseError("rf electrodes are driven; no numeric bias",
                                     line_no);
                bias = parse_number(it->second, line_no);
            }
        }

        double phase = 0.0;
        if (auto it = kv.find("rf_phase"); it != kv.end()) {
            if (role != ElectrodeRole::rf)
                throw ParseError("rf_phase only applies to rf electrodes", line_no);
            std::string tok = it->second;
            bool degrees = false;
            if (tok.size() > 3 && tok.substr(tok.size() - 3) == "deg") {
                degrees = true;
                tok.erase(tok.size() - 3);
            }
            phase = parse_number(tok, line_no);
            if (degrees) phase *= std::numbers::pi / 180.0;
        }

        const std::string zr = need("z");
        try {
            if (zr == "infinite") {
                Strip s;
                s.a = std::isinf(xa) ? xa : xa * scale;
                s.b = std::isinf(xb) ? xb : xb * scale;
                s.role = role;
                s.bias = bias;
                s.rf_phase = phase;
                s.label = label;
                g.add_strip(std::move(s));
            } else {
                const auto zc = zr.find(':');
                if (zc == std::string::npos)
                    throw ParseError("z range must be lo:hi or 'infinite'", line_no);
                RectPatch p;
                p.x0 = xa * scale;
                p.x1 = xb * scale;
                p.z0 = parse_number(zr.substr(0, zc), line_no) * scale;
                p.z1 = parse_number(zr.substr(zc + 1), line_no) * scale;
                p.role = role;
                p.bias = bias;
                p.rf_phase = phase;
                p.label = label;
                g.add_patch(std::move(p));
            }
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        any_electrode = true;
    }
    if (!any_electrode) throw ParseError("geometry file declares no electrodes", line_no);
    return g;
}

PlanarGeometry read_geometry_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open geometry file '" + path + "'", 0);
    return read_geometry(f);
}

void write_geometry(std::ostream& os, const PlanarGeometry& g,
                    const std::string& length_unit) {
    const double scale = length_unit_scale(length_unit, 0);
    os << "format_version 1\n";
    os << "units " << length_unit << " V\n";
    os.precision(12);
    auto edge = [&](double v) -> std::string {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        std::ostringstream s;
        s.precision(12);
        s << v / scale;
        return s.str();
    };
    for (const auto& s : g.strips()) {
        os << "electrode label=" << s.label
           << " role=" << (s.role == ElectrodeRole::rf ? "rf" : "control")
           << " x=" << edge(s.a) << ':' << edge(s.b) << " z=infinite";
        if (s.role == ElectrodeRole::rf) {
            os << " bias=driven";
            if (s.rf_phase != 0.0) os << " rf_phase=" << s.rf_phase;
        } else {
            os << " bias=" << s.bias;
        }
        os << '\n';
    }
    for (const auto& p : g.patches()) {
        os << "electrode label=" << p.label
           << " role=" << (p.role == ElectrodeRole::rf ? "rf" : "control")
           << " x=" << edge(p.x0) << ':' << edge(p.x1) << " z=" << edge(p.z0) << ':'
           << edge(p.z1);
        if (p.role == ElectrodeRole::rf) {
            os << " bias=driven";
            if (p.rf_phase != 0.0) os << " rf_phase=" << p.rf_phase;
        } else {
            os << " bias=" << p.bias;
        }
        os << '\n';
    }
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open '" + tmp + "' for writing");
        f << content;
        if (!f) throw Error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace iontrap

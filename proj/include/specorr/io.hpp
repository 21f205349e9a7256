#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "specorr/boundary.hpp"
#include "specorr/correlation.hpp"
#include "specorr/core.hpp"
#include "specorr/medium.hpp"

namespace specorr {

// shortest round-trip decimal form; reruns must produce byte-identical files
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::ofstream open_for_write(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    return out;
}

inline void write_curve_csv(const std::string& path, const CorrelationCurve& curve) {
    std::ofstream out = open_for_write(path);
    out << "r,c12,stderr,engine,seed\n";
    for (std::size_t i = 0; i < curve.radii.size(); ++i) {
        out << format_double(curve.radii[i]) << ',' << format_double(curve.c12[i]) << ',';
        if (!curve.std_error.empty()) out << format_double(curve.std_error[i]);
        out << ',' << engine_name(curve.engine) << ',' << curve.seed << '\n';
    }
}

inline void write_tally_dump(const std::string& path, const BoundaryTally& t, std::uint64_t seed,
                             double wall_ms) {
    std::ofstream out = open_for_write(path);
    out << "n_launched " << t.n_launched << '\n';
    out << "n_measured " << t.n_measured << '\n';
    out << "n_exited_other " << t.n_exited_other << '\n';
    out << "n_absorbed " << t.n_absorbed << '\n';
    out << "sum_w11 " << format_double(t.sum_w11) << '\n';
    out << "re_sum_w12 " << format_double(t.sum_w12.real()) << '\n';
    out << "im_sum_w12 " << format_double(t.sum_w12.imag()) << '\n';
    out << "sum_w11_sq " << format_double(t.sum_w11_sq) << '\n';
    out << "sum_re12_sq " << format_double(t.sum_re12_sq) << '\n';
    out << "sum_im12_sq " << format_double(t.sum_im12_sq) << '\n';
    out << "sum_re12_im12 " << format_double(t.sum_re12_im12) << '\n';
    for (std::size_t f = 0; f < t.face_w11.size(); ++f) {
        out << "face" << f << "_w11 " << format_double(t.face_w11[f]) << '\n';
        out << "face" << f << "_re_w12 " << format_double(t.face_w12[f].real()) << '\n';
        out << "face" << f << "_im_w12 " << format_double(t.face_w12[f].imag()) << '\n';
    }
    out << "seed " << seed << '\n';
    out << "wall_ms " << format_double(wall_ms) << '\n';
}

/*
 * Node grid as plain text: '#' header lines with the shape, then the real
 * plane and the imaginary plane.  Rows advance along the first axis; in 3D
 * each line holds one run of the last axis.
 */
template <int D>
inline void write_field_dump(const std::string& path, const FieldGrid<D>& field) {
    std::ofstream out = open_for_write(path);
    const Grid<D>& g = field.grid;
    out << "# dimension " << D << '\n';
    out << "# nodes";
    for (int a = 0; a < D; ++a) out << ' ' << g.nodes(a);
    out << '\n';
    out << "# spacing " << format_double(g.spacing()) << '\n';
    out << "# origin";
    for (int a = 0; a < D; ++a) out << ' ' << format_double(g.lo()[a]);
    out << '\n';
    const int per_line = g.nodes(D - 1);
    for (int plane = 0; plane < 2; ++plane) {
        out << (plane == 0 ? "# plane re\n" : "# plane im\n");
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            double v = plane == 0 ? field.values[idx].real() : field.values[idx].imag();
            out << format_double(v);
            out << ((idx + 1) % per_line == 0 ? '\n' : ' ');
        }
    }
}

inline void write_h_table(const std::string& path, const HFunction& h, int samples = 129) {
    if (samples < 2) throw InvalidInput("write_h_table: need at least two samples");
    std::ofstream out = open_for_write(path);
    out << "# mu H(mu), albedo " << format_double(h.albedo()) << '\n';
    for (int i = 0; i < samples; ++i) {
        double mu = static_cast<double>(i) / (samples - 1);
        out << format_double(mu) << ' ' << format_double(h.value(mu)) << '\n';
    }
}

// two whitespace-separated columns (wavenumber, density), '#' starts a comment
inline SpectrumModel load_tabulated_spectrum(const std::string& path, int dimension) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open spectrum table '" + path + "'");
    std::vector<double> xi, rho;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double a, b;
        if (!(row >> a)) continue;  // blank or comment-only line
        if (!(row >> b))
            throw InvalidInput("spectrum table '" + path + "' line " + std::to_string(lineno) +
                               ": expected two columns");
        double extra;
        if (row >> extra)
            throw InvalidInput("spectrum table '" + path + "' line " + std::to_string(lineno) +
                               ": expected two columns");
        xi.push_back(a);
        rho.push_back(b);
    }
    return SpectrumModel::tabulated(dimension, xi, rho);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

inline void write_manifest(const std::string& path, const std::string& config_text,
                           std::uint64_t seed, int workers, double wall_ms,
                           const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["config_hash"] = hex64(fnv1a64(config_text));
    j["seed"] = seed;
    j["workers"] = workers;
    j["wall_ms"] = wall_ms;
    j["version"] = kVersion;
    j["outputs"] = outputs;
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
}

}  // namespace specorr

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "specorr/boundary.hpp"
#include "specorr/correlation.hpp"
#include "specorr/core.hpp"
#include "specorr/io.hpp"
#include "specorr/medium.hpp"
#include "specorr/scene.hpp"

namespace specorr {

enum class EngineType { MonteCarlo, Diffusion, Both };

struct AbsorberConfig {
    std::vector<double> center;
    double radius = 0.0;
};

struct SupportConfig {
    std::vector<double> center;
    double r_inner = 0.0;
    double r_outer = 0.0;
};

struct ShiftConfig {
    ShiftRegime regime = ShiftRegime::None;
    ShiftProfile profile = ShiftProfile::Bump;
    double amplitude = 1.0;
    std::vector<double> direction;  // uniform profile only
    bool has_wavefront = false;
    std::vector<double> wavefront_center;
    std::vector<double> radii;
    double thickness = 0.1;
    std::vector<SupportConfig> support;
};

struct SceneConfig {
    int dimension = 2;
    std::vector<double> lo, hi;
    std::vector<int> illuminated, measured;
    double aperture_half_angle = 0.5 * kPi;
    std::vector<AbsorberConfig> absorbers;
    ShiftConfig shift;
};

enum class SpectrumConfigKind { Gaussian, Isotropic, Tabulated, Synthetic };

struct MediumConfig {
    SpectrumConfigKind kind = SpectrumConfigKind::Gaussian;
    double correlation_length = 1.0;
    double level = 1.0;
    std::string table_path;  // absolute after parsing
    double wavenumber = 1.0;
    double sigma_total = 0.0;  // synthetic media only
    double anisotropy_g = 0.0;
};

struct McConfig {
    std::uint64_t n_packets = 100000;
    std::uint64_t seed = 1;
    int n_workers = 0;  // 0: resolve from the environment at run time
};

struct DiffusionConfig {
    double grid_spacing = 0.01;
    double solver_tol = 1e-10;
    BoundaryMapMode boundary_map = BoundaryMapMode::IsotropicIdentity;
};

struct EngineConfig {
    EngineType type = EngineType::Both;
    McConfig mc;
    DiffusionConfig diffusion;
};

struct OutputConfig {
    std::string directory = "out";
    bool dump_fields = false;
    bool dump_tally = false;
    std::string curve_stem = "curve";
};

struct RunConfig {
    SceneConfig scene;
    MediumConfig medium;
    EngineConfig engine;
    OutputConfig output;
    std::string source_text;  // verbatim config body, hashed into the manifest
    std::string source_name;
};

namespace cfgdetail {

using njson = nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw InvalidInput("config: " + where + ": " + what);
}

inline void check_keys(const njson& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

inline const njson* find(const njson& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline double as_number(const njson& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline bool as_bool(const njson& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

inline std::string as_string(const njson& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

inline std::vector<double> as_number_list(const njson& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::uint64_t as_count(const njson& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline int face_index(const std::string& name, int dimension, const std::string& path) {
    static const char* names[6] = {"left", "right", "bottom", "top", "back", "front"};
    for (int f = 0; f < 6; ++f) {
        if (name == names[f]) {
            if (f >= 2 * dimension) fail(path, "face '" + name + "' needs dimension 3");
            return f;
        }
    }
    fail(path, "unknown face '" + name + "' (use left/right/bottom/top/back/front)");
}

inline std::vector<int> face_list(const njson& j, int dimension, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of face names");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string item_path = path + "[" + std::to_string(i) + "]";
        int f = face_index(as_string(j[i], item_path), dimension, item_path);
        for (int seen : out)
            if (seen == f) fail(item_path, "face listed twice");
        out.push_back(f);
    }
    return out;
}

inline ShiftRegime regime_from(const std::string& s, const std::string& path) {
    if (s == "none") return ShiftRegime::None;
    if (s == "small") return ShiftRegime::Small;
    if (s == "moderate") return ShiftRegime::Moderate;
    if (s == "large") return ShiftRegime::Large;
    fail(path, "unknown regime '" + s + "' (use none/small/moderate/large)");
}

inline ShiftProfile profile_from(const std::string& s, const std::string& path) {
    if (s == "bump") return ShiftProfile::Bump;
    if (s == "constant_radial") return ShiftProfile::ConstantRadial;
    if (s == "uniform") return ShiftProfile::Uniform;
    fail(path, "unknown profile '" + s + "' (use bump/constant_radial/uniform)");
}

inline void parse_shift(const njson& j, int dimension, ShiftConfig& out) {
    check_keys(j, "scene.shift",
               {"regime", "profile", "amplitude", "direction", "wavefront", "support"});
    if (const njson* v = find(j, "regime"))
        out.regime = regime_from(as_string(*v, "scene.shift.regime"), "scene.shift.regime");
    if (const njson* v = find(j, "profile"))
        out.profile = profile_from(as_string(*v, "scene.shift.profile"), "scene.shift.profile");
    if (const njson* v = find(j, "amplitude"))
        out.amplitude = as_number(*v, "scene.shift.amplitude");
    if (const njson* v = find(j, "direction"))
        out.direction = as_number_list(*v, "scene.shift.direction");

    if (const njson* v = find(j, "wavefront")) {
        check_keys(*v, "scene.shift.wavefront", {"center", "radii", "thickness"});
        out.has_wavefront = true;
        if (const njson* c = find(*v, "center"))
            out.wavefront_center = as_number_list(*c, "scene.shift.wavefront.center");
        else
            out.wavefront_center.assign(dimension, 0.0);
        const njson* r = find(*v, "radii");
        if (!r) fail("scene.shift.wavefront.radii", "required");
        out.radii = as_number_list(*r, "scene.shift.wavefront.radii");
        for (std::size_t i = 0; i < out.radii.size(); ++i) {
            if (!(out.radii[i] > 0.0))
                fail("scene.shift.wavefront.radii", "radii must be positive");
            if (i > 0 && !(out.radii[i] > out.radii[i - 1]))
                fail("scene.shift.wavefront.radii", "radii must be strictly increasing");
        }
        if (const njson* t = find(*v, "thickness")) {
            out.thickness = as_number(*t, "scene.shift.wavefront.thickness");
            if (!(out.thickness > 0.0))
                fail("scene.shift.wavefront.thickness", "must be positive");
        }
    }

    if (const njson* v = find(j, "support")) {
        if (!v->is_array()) fail("scene.shift.support", "expected an array of regions");
        for (std::size_t i = 0; i < v->size(); ++i) {
            std::string path = "scene.shift.support[" + std::to_string(i) + "]";
            const njson& region = (*v)[i];
            check_keys(region, path, {"center", "r_inner", "r_outer"});
            SupportConfig sc;
            if (const njson* c = find(region, "center"))
                sc.center = as_number_list(*c, path + ".center");
            else
                sc.center.assign(dimension, 0.0);
            if (const njson* a = find(region, "r_inner"))
                sc.r_inner = as_number(*a, path + ".r_inner");
            const njson* b = find(region, "r_outer");
            if (!b) fail(path + ".r_outer", "required");
            sc.r_outer = as_number(*b, path + ".r_outer");
            if (sc.r_inner < 0.0 || !(sc.r_outer > sc.r_inner))
                fail(path, "needs 0 <= r_inner < r_outer");
            out.support.push_back(std::move(sc));
        }
    }

    if (out.regime == ShiftRegime::None) {
        if (out.has_wavefront || !out.support.empty())
            fail("scene.shift", "regime none cannot carry a wavefront or support");
    } else {
        if (out.has_wavefront == !out.support.empty())
            fail("scene.shift", "give exactly one of wavefront or support");
        if (out.profile == ShiftProfile::Uniform &&
            out.direction.size() != static_cast<std::size_t>(dimension))
            fail("scene.shift.direction",
                 "uniform profile needs a direction of the scene dimension");
    }
}

inline void parse_scene(const njson& j, SceneConfig& out) {
    check_keys(j, "scene",
               {"dimension", "domain", "illuminated", "measured", "aperture_half_angle",
                "absorbers", "shift"});
    if (const njson* v = find(j, "dimension")) {
        double d = as_number(*v, "scene.dimension");
        if (d != 2.0 && d != 3.0) fail("scene.dimension", "must be 2 or 3");
        out.dimension = static_cast<int>(d);
    }
    const njson* dom = find(j, "domain");
    if (!dom) fail("scene.domain", "required");
    check_keys(*dom, "scene.domain", {"min", "max"});
    const njson* lo = find(*dom, "min");
    const njson* hi = find(*dom, "max");
    if (!lo || !hi) fail("scene.domain", "needs min and max");
    out.lo = as_number_list(*lo, "scene.domain.min");
    out.hi = as_number_list(*hi, "scene.domain.max");
    if (out.lo.size() != static_cast<std::size_t>(out.dimension) ||
        out.hi.size() != out.lo.size())
        fail("scene.domain", "min and max must match the scene dimension");
    for (int a = 0; a < out.dimension; ++a)
        if (!(out.lo[a] < out.hi[a])) fail("scene.domain", "each extent must be positive");

    const njson* ill = find(j, "illuminated");
    const njson* mea = find(j, "measured");
    if (!ill) fail("scene.illuminated", "required");
    if (!mea) fail("scene.measured", "required");
    out.illuminated = face_list(*ill, out.dimension, "scene.illuminated");
    out.measured = face_list(*mea, out.dimension, "scene.measured");
    for (int f : out.illuminated)
        for (int g : out.measured)
            if (f == g) fail("scene", "illuminated and measured boundaries intersect");

    if (const njson* v = find(j, "aperture_half_angle")) {
        out.aperture_half_angle = as_number(*v, "scene.aperture_half_angle");
        if (!(out.aperture_half_angle > 0.0 && out.aperture_half_angle <= 0.5 * kPi + 1e-15))
            fail("scene.aperture_half_angle", "must lie in (0, pi/2]");
    }

    if (const njson* v = find(j, "absorbers")) {
        if (!v->is_array()) fail("scene.absorbers", "expected an array");
        for (std::size_t i = 0; i < v->size(); ++i) {
            std::string path = "scene.absorbers[" + std::to_string(i) + "]";
            const njson& ball = (*v)[i];
            check_keys(ball, path, {"center", "radius"});
            AbsorberConfig ac;
            const njson* c = find(ball, "center");
            const njson* r = find(ball, "radius");
            if (!c || !r) fail(path, "needs center and radius");
            ac.center = as_number_list(*c, path + ".center");
            ac.radius = as_number(*r, path + ".radius");
            if (ac.center.size() != static_cast<std::size_t>(out.dimension))
                fail(path + ".center", "must match the scene dimension");
            if (!(ac.radius > 0.0)) fail(path + ".radius", "must be positive");
            out.absorbers.push_back(std::move(ac));
        }
    }

    if (const njson* v = find(j, "shift")) parse_shift(*v, out.dimension, out.shift);
}

inline void parse_medium(const njson& j, const std::string& base_dir, int dimension,
                         MediumConfig& out) {
    check_keys(j, "medium", {"spectrum", "wavenumber", "sigma_total", "anisotropy_g"});
    const njson* spec = find(j, "spectrum");
    const njson* sigma = find(j, "sigma_total");

    if (spec && sigma) fail("medium", "give either a spectrum or sigma_total, not both");
    if (!spec && !sigma) fail("medium", "needs a spectrum block or sigma_total");

    if (sigma) {
        out.kind = SpectrumConfigKind::Synthetic;
        out.sigma_total = as_number(*sigma, "medium.sigma_total");
        if (!(out.sigma_total > 0.0)) fail("medium.sigma_total", "must be positive");
        if (const njson* g = find(j, "anisotropy_g")) {
            out.anisotropy_g = as_number(*g, "medium.anisotropy_g");
            if (!(out.anisotropy_g > -1.0 && out.anisotropy_g < 1.0))
                fail("medium.anisotropy_g", "must lie in (-1, 1)");
        }
        if (find(j, "wavenumber")) fail("medium.wavenumber", "not used with synthetic media");
        return;
    }

    if (find(j, "anisotropy_g"))
        fail("medium.anisotropy_g", "only synthetic media take a direct anisotropy");
    check_keys(*spec, "medium.spectrum", {"kind", "correlation_length", "level", "file"});
    const njson* kind = find(*spec, "kind");
    if (!kind) fail("medium.spectrum.kind", "required");
    std::string k = as_string(*kind, "medium.spectrum.kind");
    if (k == "gaussian") {
        out.kind = SpectrumConfigKind::Gaussian;
        if (const njson* v = find(*spec, "correlation_length")) {
            out.correlation_length = as_number(*v, "medium.spectrum.correlation_length");
            if (!(out.correlation_length > 0.0))
                fail("medium.spectrum.correlation_length", "must be positive");
        }
        if (find(*spec, "level") || find(*spec, "file"))
            fail("medium.spectrum", "gaussian takes only correlation_length");
    } else if (k == "isotropic") {
        out.kind = SpectrumConfigKind::Isotropic;
        if (const njson* v = find(*spec, "level")) {
            out.level = as_number(*v, "medium.spectrum.level");
            if (!(out.level > 0.0)) fail("medium.spectrum.level", "must be positive");
        }
        if (find(*spec, "correlation_length") || find(*spec, "file"))
            fail("medium.spectrum", "isotropic takes only level");
    } else if (k == "tabulated") {
        out.kind = SpectrumConfigKind::Tabulated;
        const njson* f = find(*spec, "file");
        if (!f) fail("medium.spectrum.file", "required for tabulated spectra");
        std::filesystem::path p(as_string(*f, "medium.spectrum.file"));
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        out.table_path = p.string();
        if (find(*spec, "correlation_length") || find(*spec, "level"))
            fail("medium.spectrum", "tabulated takes only file");
    } else {
        fail("medium.spectrum.kind", "unknown kind '" + k + "'");
    }

    const njson* wn = find(j, "wavenumber");
    if (!wn) fail("medium.wavenumber", "required for spectrum media");
    out.wavenumber = as_number(*wn, "medium.wavenumber");
    if (!(out.wavenumber > 0.0)) fail("medium.wavenumber", "must be positive");
    (void)dimension;
}

inline void parse_engine(const njson& j, int dimension, EngineConfig& out) {
    check_keys(j, "engine", {"type", "mc", "diffusion"});
    if (const njson* v = find(j, "type")) {
        std::string t = as_string(*v, "engine.type");
        if (t == "mc") out.type = EngineType::MonteCarlo;
        else if (t == "diffusion") out.type = EngineType::Diffusion;
        else if (t == "both") out.type = EngineType::Both;
        else fail("engine.type", "unknown type '" + t + "' (use mc/diffusion/both)");
    }
    // a single-engine run carries exactly its own block
    if (out.type == EngineType::MonteCarlo && find(j, "diffusion"))
        fail("engine.diffusion", "engine type mc does not take a diffusion block");
    if (out.type == EngineType::Diffusion && find(j, "mc"))
        fail("engine.mc", "engine type diffusion does not take an mc block");
    if (const njson* v = find(j, "mc")) {
        check_keys(*v, "engine.mc", {"n_packets", "seed", "n_workers"});
        if (const njson* n = find(*v, "n_packets")) {
            out.mc.n_packets = as_count(*n, "engine.mc.n_packets");
            if (out.mc.n_packets == 0) fail("engine.mc.n_packets", "must be positive");
        }
        if (const njson* s = find(*v, "seed")) out.mc.seed = as_count(*s, "engine.mc.seed");
        if (const njson* w = find(*v, "n_workers")) {
            std::uint64_t n = as_count(*w, "engine.mc.n_workers");
            if (n > 4096) fail("engine.mc.n_workers", "implausibly large");
            out.mc.n_workers = static_cast<int>(n);
        }
    }
    if (const njson* v = find(j, "diffusion")) {
        check_keys(*v, "engine.diffusion", {"grid_spacing", "solver_tol", "boundary_map"});
        if (const njson* h = find(*v, "grid_spacing")) {
            out.diffusion.grid_spacing = as_number(*h, "engine.diffusion.grid_spacing");
            if (!(out.diffusion.grid_spacing > 0.0))
                fail("engine.diffusion.grid_spacing", "must be positive");
        }
        if (const njson* t = find(*v, "solver_tol")) {
            out.diffusion.solver_tol = as_number(*t, "engine.diffusion.solver_tol");
            if (!(out.diffusion.solver_tol > 0.0))
                fail("engine.diffusion.solver_tol", "must be positive");
        }
        if (const njson* m = find(*v, "boundary_map")) {
            std::string s = as_string(*m, "engine.diffusion.boundary_map");
            if (s == "isotropic-identity")
                out.diffusion.boundary_map = BoundaryMapMode::IsotropicIdentity;
            else if (s == "chandrasekhar")
                out.diffusion.boundary_map = BoundaryMapMode::Chandrasekhar;
            else
                fail("engine.diffusion.boundary_map",
                     "unknown mode '" + s + "' (use isotropic-identity/chandrasekhar)");
            if (out.diffusion.boundary_map == BoundaryMapMode::Chandrasekhar && dimension == 2)
                fail("engine.diffusion.boundary_map",
                     "the chandrasekhar map is defined for dimension 3 only");
        }
    }
}

inline void parse_output(const njson& j, OutputConfig& out) {
    check_keys(j, "output", {"directory", "dump_fields", "dump_tally", "curve_stem"});
    if (const njson* v = find(j, "directory"))
        out.directory = as_string(*v, "output.directory");
    if (const njson* v = find(j, "dump_fields"))
        out.dump_fields = as_bool(*v, "output.dump_fields");
    if (const njson* v = find(j, "dump_tally")) out.dump_tally = as_bool(*v, "output.dump_tally");
    if (const njson* v = find(j, "curve_stem"))
        out.curve_stem = as_string(*v, "output.curve_stem");
}

}  // namespace cfgdetail

inline RunConfig parse_config_text(const std::string& text, const std::string& source_name,
                                   const std::string& base_dir) {
    using cfgdetail::njson;
    njson root;
    try {
        root = njson::parse(text);
    } catch (const njson::parse_error& e) {
        // anchor the message to a line and column for editor-friendly output
        std::size_t line = 1, col = 1;
        std::size_t stop = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw InvalidInput("config " + source_name + " line " + std::to_string(line) +
                           " column " + std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) throw InvalidInput("config: top level must be an object");
    cfgdetail::check_keys(root, "", {"scene", "medium", "engine", "output"});

    RunConfig cfg;
    cfg.source_text = text;
    cfg.source_name = source_name;

    const njson* scene = cfgdetail::find(root, "scene");
    if (!scene) cfgdetail::fail("scene", "required");
    cfgdetail::parse_scene(*scene, cfg.scene);

    const njson* medium = cfgdetail::find(root, "medium");
    if (!medium) cfgdetail::fail("medium", "required");
    cfgdetail::parse_medium(*medium, base_dir, cfg.scene.dimension, cfg.medium);

    if (const njson* engine = cfgdetail::find(root, "engine"))
        cfgdetail::parse_engine(*engine, cfg.scene.dimension, cfg.engine);
    if (const njson* output = cfgdetail::find(root, "output"))
        cfgdetail::parse_output(*output, cfg.output);

    // cross-block invariants
    bool wants_mc = cfg.engine.type != EngineType::Diffusion;
    if (wants_mc && cfg.medium.kind == SpectrumConfigKind::Synthetic &&
        cfg.medium.anisotropy_g != 0.0)
        cfgdetail::fail("medium.anisotropy_g",
                        "synthetic anisotropic media have no sampling law; "
                        "use a spectrum or the diffusion engine");
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::filesystem::path p(path);
    std::string dir = p.has_parent_path() ? p.parent_path().string() : ".";
    return parse_config_text(buf.str(), path, dir);
}

template <int D>
inline Vec<D> to_vec(const std::vector<double>& v, const char* what) {
    if (v.size() != static_cast<std::size_t>(D))
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(D) +
                           " components");
    Vec<D> out{};
    for (int i = 0; i < D; ++i) out[i] = v[i];
    return out;
}

// scene geometry without any shift attached; sweeps and single runs add it
template <int D>
inline Scene<D> build_scene(const SceneConfig& sc) {
    Scene<D> scene;
    scene.lo = to_vec<D>(sc.lo, "scene.domain.min");
    scene.hi = to_vec<D>(sc.hi, "scene.domain.max");
    scene.illuminated = sc.illuminated;
    scene.measured = sc.measured;
    scene.aperture_half_angle = sc.aperture_half_angle;
    for (const auto& a : sc.absorbers)
        scene.absorbers.push_back({to_vec<D>(a.center, "absorber center"), a.radius});
    scene.validate();
    return scene;
}

template <int D>
inline ShiftField<D> build_single_shift(const ShiftConfig& sc) {
    ShiftField<D> field;
    if (sc.regime == ShiftRegime::None) return field;
    field.regime = sc.regime;
    field.profile = sc.profile;
    field.amplitude = sc.amplitude;
    if (sc.profile == ShiftProfile::Uniform)
        field.uniform_dir = to_vec<D>(sc.direction, "scene.shift.direction");
    if (!sc.support.empty()) {
        for (const auto& r : sc.support)
            field.support.push_back(
                {to_vec<D>(r.center, "shift support center"), r.r_inner, r.r_outer});
        return field;
    }
    if (sc.radii.size() != 1)
        throw InvalidInput(
            "config: scene.shift.wavefront: a single run needs exactly one radius; "
            "use the sweep subcommand for a radius series");
    auto fields = wavefront_sequence<D>(to_vec<D>(sc.wavefront_center, "wavefront center"),
                                        sc.radii, sc.thickness, sc.regime);
    fields[0].profile = sc.profile;
    fields[0].amplitude = sc.amplitude;
    if (sc.profile == ShiftProfile::Uniform) fields[0].uniform_dir = field.uniform_dir;
    return fields[0];
}

template <int D>
inline WavefrontSweep<D> build_sweep(const ShiftConfig& sc) {
    if (sc.regime == ShiftRegime::None || !sc.has_wavefront)
        throw InvalidInput("config: sweep runs need scene.shift.wavefront with a radius list");
    WavefrontSweep<D> sweep;
    sweep.center = to_vec<D>(sc.wavefront_center, "wavefront center");
    sweep.radii = sc.radii;
    sweep.thickness = sc.thickness;
    sweep.regime = sc.regime;
    sweep.profile = sc.profile;
    sweep.amplitude = sc.amplitude;
    return sweep;
}

// spectrum-backed media only; synthetic media skip the model entirely
inline SpectrumModel build_spectrum(const MediumConfig& mc, int dimension) {
    switch (mc.kind) {
        case SpectrumConfigKind::Gaussian:
            return SpectrumModel::gaussian(dimension, mc.correlation_length);
        case SpectrumConfigKind::Isotropic:
            return SpectrumModel::isotropic(dimension, mc.level);
        case SpectrumConfigKind::Tabulated:
            return load_tabulated_spectrum(mc.table_path, dimension);
        case SpectrumConfigKind::Synthetic:
            break;
    }
    throw InvalidInput("build_spectrum: synthetic media carry no spectrum");
}

inline TransportCoefficients build_coefficients(const MediumConfig& mc, int dimension) {
    if (mc.kind == SpectrumConfigKind::Synthetic)
        return synthetic_coefficients(dimension, mc.sigma_total, mc.anisotropy_g);
    return compute_coefficients(build_spectrum(mc, dimension), mc.wavenumber);
}

}  // namespace specorr

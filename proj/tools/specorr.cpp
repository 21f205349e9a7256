// Command-line front end: parse a run config, drive the requested engine(s),
// and leave curves, dumps, and a manifest in the output directory.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <specorr/boundary.hpp>
#include <specorr/config.hpp>
#include <specorr/correlation.hpp>
#include <specorr/io.hpp>
#include <specorr/medium.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Overrides {
    std::string config;
    std::string out;
    std::int64_t seed = -1;    // <0: keep the config value
    int workers = -1;          // <0: config, then environment
};

void add_common(CLI::App* cmd, Overrides& o, bool config_required = true) {
    auto* copt = cmd->add_option("--config", o.config, "run configuration file");
    if (config_required) copt->required();
    cmd->add_option("--out", o.out, "output directory (overrides the config)");
    cmd->add_option("--seed", o.seed, "Monte Carlo seed (overrides the config)");
    cmd->add_option("--workers", o.workers, "worker thread count (overrides the config)");
}

int resolve_workers(const specorr::RunConfig& cfg, int cli_workers) {
    if (cli_workers >= 1) return cli_workers;
    if (cfg.engine.mc.n_workers >= 1) return cfg.engine.mc.n_workers;
    if (const char* env = std::getenv("SPECORR_WORKERS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || n < 1 || n > 4096)
            throw specorr::InvalidInput(std::string("SPECORR_WORKERS='") + env +
                                        "' is not a worker count");
        return static_cast<int>(n);
    }
    return 1;
}

specorr::RunConfig load_config(const Overrides& o) {
    specorr::RunConfig cfg = specorr::parse_config(o.config);
    if (!o.out.empty()) cfg.output.directory = o.out;
    if (o.seed >= 0) cfg.engine.mc.seed = static_cast<std::uint64_t>(o.seed);
    return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// transport coefficients plus, when sampling is requested, the scatter table
struct MediumBundle {
    specorr::TransportCoefficients coeffs;
    std::unique_ptr<specorr::ScatterTable> table;
};

MediumBundle make_medium(const specorr::MediumConfig& mc, int dimension, bool for_mc) {
    MediumBundle b;
    if (mc.kind == specorr::SpectrumConfigKind::Synthetic) {
        if (for_mc && mc.anisotropy_g != 0.0)
            throw specorr::InvalidInput(
                "synthetic anisotropic media have no sampling law; "
                "use a spectrum or the diffusion engine");
        b.coeffs = specorr::synthetic_coefficients(dimension, mc.sigma_total, mc.anisotropy_g);
        return b;
    }
    specorr::SpectrumModel model = specorr::build_spectrum(mc, dimension);
    b.coeffs = specorr::compute_coefficients(model, mc.wavenumber);
    if (for_mc) b.table = std::make_unique<specorr::ScatterTable>(model, mc.wavenumber);
    return b;
}

// Dirichlet level for the illuminated faces under the configured boundary map
double source_level(const specorr::DiffusionConfig& dc) {
    if (dc.boundary_map == specorr::BoundaryMapMode::IsotropicIdentity)
        return specorr::map_constant_source(1.0, nullptr, dc.boundary_map);
    specorr::HFunction h = specorr::compute_h_function(1.0);
    return specorr::map_constant_source(1.0, &h, dc.boundary_map);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---------------------------------------------------------------- kernel ---

int cmd_kernel(const Overrides& o) {
    specorr::RunConfig cfg = load_config(o);
    MediumBundle b = make_medium(cfg.medium, cfg.scene.dimension, false);
    const auto& c = b.coeffs;
    std::cout << "dimension " << c.dimension << '\n'
              << "sigma_total " << specorr::format_double(c.sigma_total) << '\n'
              << "mean_free_path " << specorr::format_double(c.mean_free_path) << '\n'
              << "anisotropy_g " << specorr::format_double(c.anisotropy) << '\n'
              << "diffusion_scalar " << specorr::format_double(c.diffusion_scalar) << '\n';
    if (cfg.medium.kind != specorr::SpectrumConfigKind::Synthetic)
        std::cout << "wavenumber " << specorr::format_double(c.k_mag) << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------ hfun ---

int cmd_hfun(const Overrides& o, double albedo, int samples) {
    specorr::HFunction h = specorr::compute_h_function(albedo);
    if (o.out.empty()) {
        std::cout << "# mu H(mu), albedo " << specorr::format_double(albedo) << '\n';
        for (int i = 0; i < samples; ++i) {
            double mu = static_cast<double>(i) / (samples - 1);
            std::cout << specorr::format_double(mu) << ' ' << specorr::format_double(h.value(mu))
                      << '\n';
        }
        return kExitOk;
    }
    std::string path = join_path(o.out, "h_table.txt");
    specorr::write_h_table(path, h, samples);
    std::cout << "wrote " << path << '\n';
    return kExitOk;
}

// ------------------------------------------------------- engine dispatch ---

template <int D>
specorr::CorrelationCurve single_curve_mc(const specorr::RunConfig& cfg, int workers,
                                          specorr::BoundaryTally* tally_out) {
    specorr::Scene<D> scene = specorr::build_scene<D>(cfg.scene);
    scene.shift = specorr::build_single_shift<D>(cfg.scene.shift);
    MediumBundle b = make_medium(cfg.medium, D, true);
    specorr::RunParams params;
    params.n_packets = cfg.engine.mc.n_packets;
    params.seed = cfg.engine.mc.seed;
    params.n_workers = workers;
    specorr::BoundaryTally tally =
        specorr::run_transport<D>(scene, b.coeffs, b.table.get(), params);
    specorr::CorrelationEstimate est = specorr::c12_from_tally(tally);
    if (tally_out) *tally_out = tally;
    specorr::CorrelationCurve curve;
    curve.engine = specorr::EngineKind::MonteCarlo;
    curve.seed = params.seed;
    curve.radii = {scene.shift.outer_radius()};
    curve.c12 = {est.value};
    curve.std_error = {est.std_error};
    return curve;
}

template <int D>
specorr::CorrelationCurve single_curve_diffusion(const specorr::RunConfig& cfg,
                                                 std::optional<specorr::DiffusionRun<D>>* run_out) {
    specorr::Scene<D> scene = specorr::build_scene<D>(cfg.scene);
    scene.shift = specorr::build_single_shift<D>(cfg.scene.shift);
    MediumBundle b = make_medium(cfg.medium, D, false);
    const auto& dc = cfg.engine.diffusion;
    specorr::DiffusionRun<D> run = specorr::c12_diffusion_single<D>(
        scene, specorr::grid_diffusion_scalar(b.coeffs), dc.grid_spacing, source_level(dc),
        dc.solver_tol);
    specorr::CorrelationCurve curve;
    curve.engine = specorr::EngineKind::Diffusion;
    curve.radii = {scene.shift.outer_radius()};
    curve.c12 = {run.c12};
    if (run_out) run_out->emplace(std::move(run));
    return curve;
}

template <int D>
specorr::CorrelationCurve sweep_curve_mc(const specorr::RunConfig& cfg, int workers) {
    specorr::Scene<D> scene = specorr::build_scene<D>(cfg.scene);
    specorr::WavefrontSweep<D> sweep = specorr::build_sweep<D>(cfg.scene.shift);
    MediumBundle b = make_medium(cfg.medium, D, true);
    specorr::RunParams params;
    params.n_packets = cfg.engine.mc.n_packets;
    params.seed = cfg.engine.mc.seed;
    params.n_workers = workers;
    return specorr::run_sweep_mc<D>(scene, sweep, b.coeffs, b.table.get(), params);
}

template <int D>
specorr::CorrelationCurve sweep_curve_diffusion(const specorr::RunConfig& cfg) {
    specorr::Scene<D> scene = specorr::build_scene<D>(cfg.scene);
    specorr::WavefrontSweep<D> sweep = specorr::build_sweep<D>(cfg.scene.shift);
    MediumBundle b = make_medium(cfg.medium, D, false);
    const auto& dc = cfg.engine.diffusion;
    return specorr::run_sweep_diffusion<D>(scene, sweep,
                                           specorr::grid_diffusion_scalar(b.coeffs),
                                           dc.grid_spacing, source_level(dc), dc.solver_tol);
}

// agreement report between the two engines over a shared radius list; the
// tolerance is the larger of 10% of the diffusion value and three MC sigma
void write_agreement(const std::string& path, const specorr::CorrelationCurve& mc,
                     const specorr::CorrelationCurve& diff) {
    std::ofstream out = specorr::open_for_write(path);
    out << "# r c12_mc stderr_mc c12_diffusion abs_diff tol status\n";
    bool all_ok = true;
    for (std::size_t i = 0; i < mc.radii.size(); ++i) {
        double se = i < mc.std_error.size() ? mc.std_error[i] : 0.0;
        double delta = std::abs(mc.c12[i] - diff.c12[i]);
        double tol = std::max(0.1 * diff.c12[i], 3.0 * se);
        bool ok = delta <= tol;
        all_ok = all_ok && ok;
        out << specorr::format_double(mc.radii[i]) << ' ' << specorr::format_double(mc.c12[i]) << ' '
            << specorr::format_double(se) << ' ' << specorr::format_double(diff.c12[i]) << ' '
            << specorr::format_double(delta) << ' ' << specorr::format_double(tol) << ' '
            << (ok ? "ok" : "DISAGREE") << '\n';
    }
    out << "# overall " << (all_ok ? "agree" : "disagree") << '\n';
    if (!all_ok)
        std::cerr << "warning: engines disagree beyond tolerance, see " << path << '\n';
}

enum class RunShape { Single, Sweep };

template <int D>
int run_engines(const specorr::RunConfig& cfg, const Overrides& o, RunShape shape,
                bool force_both) {
    auto t0 = std::chrono::steady_clock::now();
    const std::string& dir = cfg.output.directory;
    std::vector<std::string> outputs;

    bool want_mc = force_both || cfg.engine.type != specorr::EngineType::Diffusion;
    bool want_diff = force_both || cfg.engine.type != specorr::EngineType::MonteCarlo;
    int workers = resolve_workers(cfg, o.workers);

    specorr::CorrelationCurve curve_mc, curve_diff;

    if (want_mc) {
        specorr::BoundaryTally tally;
        if (shape == RunShape::Single)
            curve_mc = single_curve_mc<D>(cfg, workers, &tally);
        else
            curve_mc = sweep_curve_mc<D>(cfg, workers);
        std::string path = join_path(dir, cfg.output.curve_stem + "_mc.csv");
        specorr::write_curve_csv(path, curve_mc);
        outputs.push_back(path);
        if (shape == RunShape::Single && cfg.output.dump_tally) {
            std::string tpath = join_path(dir, "tally_mc.txt");
            specorr::write_tally_dump(tpath, tally, curve_mc.seed, elapsed_ms(t0));
            outputs.push_back(tpath);
        }
    }
    if (want_diff) {
        std::optional<specorr::DiffusionRun<D>> run;
        if (shape == RunShape::Single)
            curve_diff = single_curve_diffusion<D>(cfg, &run);
        else
            curve_diff = sweep_curve_diffusion<D>(cfg);
        std::string path = join_path(dir, cfg.output.curve_stem + "_diffusion.csv");
        specorr::write_curve_csv(path, curve_diff);
        outputs.push_back(path);
        if (run && cfg.output.dump_fields) {
            std::string p11 = join_path(dir, "w11.txt");
            std::string p12 = join_path(dir, "w12.txt");
            specorr::write_field_dump<D>(p11, run->w11);
            specorr::write_field_dump<D>(p12, run->w12);
            outputs.push_back(p11);
            outputs.push_back(p12);
        }
    }
    if (want_mc && want_diff) {
        std::string apath = join_path(dir, "agreement.txt");
        write_agreement(apath, curve_mc, curve_diff);
        outputs.push_back(apath);
    }

    std::string mpath = join_path(dir, "manifest.json");
    specorr::write_manifest(mpath, cfg.source_text, cfg.engine.mc.seed, workers,
                            elapsed_ms(t0), outputs);

    for (const auto& p : outputs) std::cout << "wrote " << p << '\n';
    if (shape == RunShape::Single) {
        if (want_mc)
            std::cout << "c12_mc " << specorr::format_double(curve_mc.c12[0]) << " stderr "
                      << specorr::format_double(curve_mc.std_error[0]) << '\n';
        if (want_diff)
            std::cout << "c12_diffusion " << specorr::format_double(curve_diff.c12[0]) << '\n';
    }
    return kExitOk;
}

int dispatch(const Overrides& o, RunShape shape, specorr::EngineType only, bool force_both) {
    specorr::RunConfig cfg = load_config(o);
    if (!force_both) cfg.engine.type = only;
    if (cfg.scene.dimension == 2) return run_engines<2>(cfg, o, shape, force_both);
    return run_engines<3>(cfg, o, shape, force_both);
}

int dispatch_sweep(const Overrides& o) {
    specorr::RunConfig cfg = load_config(o);
    if (cfg.scene.dimension == 2)
        return run_engines<2>(cfg, o, RunShape::Sweep, false);
    return run_engines<3>(cfg, o, RunShape::Sweep, false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speckle decorrelation from locally shifted scatterers"};
    app.require_subcommand(1);

    Overrides o;
    double albedo = 1.0;
    int samples = 129;

    CLI::App* kernel = app.add_subcommand("kernel", "print transport coefficients");
    add_common(kernel, o);

    CLI::App* hfun = app.add_subcommand("hfun", "tabulate the half-space H-function");
    hfun->add_option("--albedo", albedo, "single-scattering albedo in (0,1]")
        ->check(CLI::Range(1e-12, 1.0));
    hfun->add_option("--samples", samples, "table rows")->check(CLI::Range(2, 1 << 20));
    hfun->add_option("--out", o.out, "output directory (default: print to stdout)");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo correlation, single shift field");
    add_common(mc, o);
    CLI::App* diffusion =
        app.add_subcommand("diffusion", "diffusion-limit correlation, single shift field");
    add_common(diffusion, o);
    CLI::App* sweep =
        app.add_subcommand("sweep", "correlation curve over an expanding wavefront");
    add_common(sweep, o);
    CLI::App* compare =
        app.add_subcommand("compare", "run both engines and write an agreement report");
    add_common(compare, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernel->parsed()) return cmd_kernel(o);
        if (hfun->parsed()) return cmd_hfun(o, albedo, samples);
        if (mc->parsed())
            return dispatch(o, RunShape::Single, specorr::EngineType::MonteCarlo, false);
        if (diffusion->parsed())
            return dispatch(o, RunShape::Single, specorr::EngineType::Diffusion, false);
        if (sweep->parsed()) return dispatch_sweep(o);
        if (compare->parsed()) {
            specorr::RunConfig probe = load_config(o);
            RunShape shape = probe.scene.shift.has_wavefront && probe.scene.shift.radii.size() > 1
                                 ? RunShape::Sweep
                                 : RunShape::Single;
            return dispatch(o, shape, specorr::EngineType::Both, true);
        }
    } catch (const specorr::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const specorr::InvalidScene& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const specorr::DegenerateMedium& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}

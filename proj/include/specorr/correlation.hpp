#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "specorr/boundary.hpp"
#include "specorr/diffusion.hpp"
#include "specorr/medium.hpp"
#include "specorr/quadrature.hpp"
#include "specorr/scene.hpp"
#include "specorr/transport.hpp"

namespace specorr {

enum class EngineKind { MonteCarlo, Diffusion };

inline const char* engine_name(EngineKind e) {
    return e == EngineKind::MonteCarlo ? "mc" : "diffusion";
}

// scalar in front of the grid Laplacian; constants common to all three
// fields drop out of the correlation, so only the anisotropy factor is kept
inline double grid_diffusion_scalar(const TransportCoefficients& coeffs) {
    if (!(coeffs.anisotropy < 1.0))
        throw NearSingularTransport("grid_diffusion_scalar: anisotropy must stay below 1");
    return 1.0 / (1.0 - coeffs.anisotropy);
}

struct CorrelationEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic estimates
};

struct CorrelationCurve {
    std::vector<double> radii;
    std::vector<double> c12;
    std::vector<double> std_error;  // empty for the diffusion engine
    EngineKind engine = EngineKind::MonteCarlo;
    std::uint64_t seed = 0;
};

/*
 * Speckle correlation from a transport tally: |sum w12|^2 / (sum w11)^2,
 * the second factor standing in for both autocorrelations since the shifted
 * and unshifted intensities agree in law.  The standard error propagates the
 * per-packet sample covariance of (exit indicator, Re w12, Im w12) through
 * the gradient of that ratio; for a shift-free run every term cancels
 * exactly and the error comes out identically zero.
 */
inline CorrelationEstimate c12_from_tally(const BoundaryTally& t) {
    if (!(t.sum_w11 > 0.0))
        throw UndefinedCorrelation("c12_from_tally: no packets reached the measured boundary");
    const double n = static_cast<double>(t.n_launched);
    const double m1 = t.sum_w11 / n;
    const double mr = t.sum_w12.real() / n;
    const double mi = t.sum_w12.imag() / n;

    CorrelationEstimate est;
    est.value = (t.sum_w12.real() * t.sum_w12.real() + t.sum_w12.imag() * t.sum_w12.imag()) /
                (t.sum_w11 * t.sum_w11);

    // single-packet covariances; the exit indicator squares to itself and
    // multiplies the weight contributions unchanged
    const double v_x = m1 - m1 * m1;
    const double v_r = t.sum_re12_sq / n - mr * mr;
    const double v_i = t.sum_im12_sq / n - mi * mi;
    const double c_ri = t.sum_re12_im12 / n - mr * mi;
    const double c_xr = mr - m1 * mr;
    const double c_xi = mi - m1 * mi;

    const double g_x = -2.0 * (mr * mr + mi * mi) / (m1 * m1 * m1);
    const double g_r = 2.0 * mr / (m1 * m1);
    const double g_i = 2.0 * mi / (m1 * m1);

    double var = g_x * g_x * v_x + g_r * g_r * v_r + g_i * g_i * v_i + 2.0 * g_x * g_r * c_xr +
                 2.0 * g_x * g_i * c_xi + 2.0 * g_r * g_i * c_ri;
    var /= n;
    est.std_error = var > 0.0 ? std::sqrt(var) : 0.0;
    return est;
}

template <int D>
inline cplx summed_boundary_flux(const FieldGrid<D>& field, const DiffusionProblem<D>& prob,
                                 const std::vector<int>& faces) {
    cplx total{0.0, 0.0};
    for (int f : faces) total += boundary_flux<D>(field, prob, f);
    return total;
}

// diffusion-limit correlation from solved fields; prob supplies the shared
// face data and diffusion scalar of the three problems
template <int D>
inline double c12_from_fields(const FieldGrid<D>& w11, const FieldGrid<D>& w22,
                              const FieldGrid<D>& w12, const DiffusionProblem<D>& prob,
                              const std::vector<int>& faces) {
    cplx f11 = summed_boundary_flux<D>(w11, prob, faces);
    cplx f22 = summed_boundary_flux<D>(w22, prob, faces);
    cplx f12 = summed_boundary_flux<D>(w12, prob, faces);
    double denom = f11.real() * f22.real();
    if (denom == 0.0)
        throw UndefinedCorrelation("c12_from_fields: no flux through the measured boundary");
    return (f12.real() * f12.real() + f12.imag() * f12.imag()) / denom;
}

/*
 * Grid problem for one scene.  cross_field selects the cross-correlation
 * variant: shifted regions become exclusions in the moderate and large
 * regimes, or an imaginary absorption -i (div psi) in the small regime.
 */
template <int D>
inline DiffusionProblem<D> diffusion_problem_for(const Scene<D>& scene, double grid_spacing,
                                                 double diffusion_scalar, double q_const,
                                                 bool cross_field, double solver_tol = 1e-10) {
    scene.validate();
    Grid<D> grid(scene.lo, scene.hi, grid_spacing);
    DiffusionProblem<D> prob(grid);
    prob.diffusion_scalar = diffusion_scalar;
    prob.solver_tol = solver_tol;
    prob.measured_faces = scene.measured;
    for (int f : scene.illuminated)
        prob.face_values[f] = [q_const](const Vec<D>&) { return q_const; };
    for (const auto& ball : scene.absorbers)
        prob.excluded.push_back([ball](const Vec<D>& x) { return ball.contains(x); });
    if (cross_field && scene.shift.regime != ShiftRegime::None) {
        if (scene.shift.regime == ShiftRegime::Small) {
            ShiftField<D> shift = scene.shift;
            prob.absorption_divergence = [shift](const Vec<D>& x) { return shift.divergence(x); };
        } else {
            ShiftField<D> shift = scene.shift;
            prob.excluded.push_back([shift](const Vec<D>& x) { return shift.contains(x); });
        }
    }
    return prob;
}

template <int D>
struct DiffusionRun {
    FieldGrid<D> w11;
    FieldGrid<D> w12;
    double flux11 = 0.0;
    cplx flux12{0.0, 0.0};
    double c12 = 0.0;
};

template <int D>
inline DiffusionRun<D> c12_diffusion_single(const Scene<D>& scene, double diffusion_scalar,
                                            double grid_spacing, double q_const = 1.0,
                                            double solver_tol = 1e-10) {
    DiffusionProblem<D> base =
        diffusion_problem_for<D>(scene, grid_spacing, diffusion_scalar, q_const, false,
                                 solver_tol);
    DiffusionProblem<D> cross =
        diffusion_problem_for<D>(scene, grid_spacing, diffusion_scalar, q_const, true,
                                 solver_tol);
    DiffusionRun<D> run{solve_diffusion<D>(base), solve_diffusion<D>(cross)};
    cplx f11 = summed_boundary_flux<D>(run.w11, base, scene.measured);
    run.flux11 = f11.real();
    run.flux12 = summed_boundary_flux<D>(run.w12, base, scene.measured);
    double denom = run.flux11 * run.flux11;
    if (denom == 0.0)
        throw UndefinedCorrelation(
            "c12_diffusion_single: no flux through the measured boundary");
    run.c12 = (run.flux12.real() * run.flux12.real() + run.flux12.imag() * run.flux12.imag()) /
              denom;
    return run;
}

template <int D>
inline CorrelationEstimate c12_mc_single(const Scene<D>& scene,
                                         const TransportCoefficients& coeffs,
                                         const ScatterTable* table, const RunParams& params) {
    return c12_from_tally(run_transport<D>(scene, coeffs, table, params));
}

// expanding-wavefront experiment: one shift field per radius
template <int D>
struct WavefrontSweep {
    Vec<D> center{};
    std::vector<double> radii;
    double thickness = 0.1;
    ShiftRegime regime = ShiftRegime::Large;
    ShiftProfile profile = ShiftProfile::Bump;
    double amplitude = 1.0;
};

template <int D>
inline std::vector<ShiftField<D>> sweep_fields(const WavefrontSweep<D>& sweep) {
    auto fields =
        wavefront_sequence<D>(sweep.center, sweep.radii, sweep.thickness, sweep.regime);
    for (auto& f : fields) {
        f.profile = sweep.profile;
        f.amplitude = sweep.amplitude;
    }
    return fields;
}

template <int D>
inline CorrelationCurve run_sweep_mc(Scene<D> scene, const WavefrontSweep<D>& sweep,
                                     const TransportCoefficients& coeffs,
                                     const ScatterTable* table, const RunParams& params) {
    auto fields = sweep_fields<D>(sweep);
    CorrelationCurve curve;
    curve.engine = EngineKind::MonteCarlo;
    curve.seed = params.seed;
    curve.radii = sweep.radii;
    for (const auto& f : fields) {
        scene.shift = f;
        // same seed for every radius: consecutive points share their packet
        // histories, so the curve moves smoothly rather than by noise
        CorrelationEstimate est = c12_mc_single<D>(scene, coeffs, table, params);
        curve.c12.push_back(est.value);
        curve.std_error.push_back(est.std_error);
    }
    return curve;
}

template <int D>
inline CorrelationCurve run_sweep_diffusion(Scene<D> scene, const WavefrontSweep<D>& sweep,
                                            double diffusion_scalar, double grid_spacing,
                                            double q_const = 1.0, double solver_tol = 1e-10) {
    auto fields = sweep_fields<D>(sweep);

    scene.shift = ShiftField<D>{};
    DiffusionProblem<D> base =
        diffusion_problem_for<D>(scene, grid_spacing, diffusion_scalar, q_const, false,
                                 solver_tol);
    FieldGrid<D> w11 = solve_diffusion<D>(base);
    double f11 = summed_boundary_flux<D>(w11, base, scene.measured).real();
    if (f11 * f11 == 0.0)
        throw UndefinedCorrelation(
            "run_sweep_diffusion: no flux through the measured boundary");

    CorrelationCurve curve;
    curve.engine = EngineKind::Diffusion;
    curve.radii = sweep.radii;
    for (const auto& f : fields) {
        scene.shift = f;
        DiffusionProblem<D> cross =
            diffusion_problem_for<D>(scene, grid_spacing, diffusion_scalar, q_const, true,
                                     solver_tol);
        FieldGrid<D> w12 = solve_diffusion<D>(cross);
        cplx f12 = summed_boundary_flux<D>(w12, base, scene.measured);
        curve.c12.push_back((f12.real() * f12.real() + f12.imag() * f12.imag()) / (f11 * f11));
    }
    return curve;
}

/*
 * Magnitude of the in-scattering gain integral under a rigid shift of size
 * lambda = |k||phi| along the propagation axis,
 *
 *   | Int_{S^{d-1}} f(p.k) e^{i lambda (p - k).phi_hat} dp |,   phi_hat = k_hat.
 *
 * The 2D angle integral is periodic and analytic, so a plain equispaced rule
 * is spectrally accurate once it resolves the oscillation; the 3D case
 * reduces to a polar integral handled by Gauss-Legendre with the node count
 * grown alongside lambda.
 */
inline double phase_modulated_gain(const SpectrumModel& model, double k_mag, double lambda) {
    if (lambda < 0.0) throw InvalidInput("phase_modulated_gain: lambda must be non-negative");
    PhaseFunction f = phase_function(model, k_mag);
    const int d = model.dimension();
    cplx acc{0.0, 0.0};
    if (d == 2) {
        const int n = 4096 + 4 * static_cast<int>(std::ceil(lambda));
        const double step = 2.0 * kPi / n;
        for (int i = 0; i < n; ++i) {
            double c = std::cos(i * step);
            double phase = lambda * (c - 1.0);
            acc += f(c) * cplx{std::cos(phase), std::sin(phase)};
        }
        acc *= step;
    } else {
        const int n = 256 + static_cast<int>(std::ceil(lambda));
        QuadRule rule = gauss_legendre(n, -1.0, 1.0);
        for (int i = 0; i < n; ++i) {
            double mu = rule.x[i];
            double phase = lambda * (mu - 1.0);
            acc += rule.w[i] * f(mu) * cplx{std::cos(phase), std::sin(phase)};
        }
        acc *= 2.0 * kPi;
    }
    return std::abs(acc);
}

}  // namespace specorr

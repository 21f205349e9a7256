#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "specorr/core.hpp"
#include "specorr/medium.hpp"
#include "specorr/rng.hpp"
#include "specorr/scene.hpp"

namespace specorr {

template <int D>
struct PhotonPacket {
    Vec<D> pos{};
    Vec<D> dir{};
    cplx corr_weight{1.0, 0.0};
    bool alive = true;
};

enum class StepEvent { Scattered, ExitedMeasured, ExitedOther, Absorbed };

/*
 * Boundary tally over the measured faces.  Field-autocorrelation exits carry
 * unit weight, the cross-correlation carries the accumulated phase weight;
 * second-moment accumulators feed the error propagation downstream.
 */
struct BoundaryTally {
    std::uint64_t n_launched = 0;
    std::uint64_t n_measured = 0;
    std::uint64_t n_exited_other = 0;
    std::uint64_t n_absorbed = 0;

    double sum_w11 = 0.0;
    cplx sum_w12{0.0, 0.0};
    double sum_w11_sq = 0.0;
    double sum_re12_sq = 0.0;
    double sum_im12_sq = 0.0;
    double sum_re12_im12 = 0.0;

    std::vector<double> face_w11;  // indexed by face
    std::vector<cplx> face_w12;

    double sum_abs_w12_sq() const { return sum_re12_sq + sum_im12_sq; }

    void resize_faces(int n) {
        face_w11.assign(n, 0.0);
        face_w12.assign(n, cplx{0.0, 0.0});
    }

    void merge(const BoundaryTally& o) {
        n_launched += o.n_launched;
        n_measured += o.n_measured;
        n_exited_other += o.n_exited_other;
        n_absorbed += o.n_absorbed;
        sum_w11 += o.sum_w11;
        sum_w12 += o.sum_w12;
        sum_w11_sq += o.sum_w11_sq;
        sum_re12_sq += o.sum_re12_sq;
        sum_im12_sq += o.sum_im12_sq;
        sum_re12_im12 += o.sum_re12_im12;
        if (face_w11.size() < o.face_w11.size()) resize_faces(static_cast<int>(o.face_w11.size()));
        for (std::size_t i = 0; i < o.face_w11.size(); ++i) {
            face_w11[i] += o.face_w11[i];
            face_w12[i] += o.face_w12[i];
        }
    }
};

struct RunParams {
    std::uint64_t n_packets = 0;
    std::uint64_t seed = 0;
    int n_workers = 1;
    std::uint64_t max_steps = 50'000'000;  // per packet; trips NumericalFailure
};

namespace detail {

// cosine-law direction into the domain about the inward normal of face f
template <int D>
inline Vec<D> sample_launch_dir(int f, Philox& rng) {
    int axis = Scene<D>::face_axis(f);
    double inward = Scene<D>::face_side(f) ? -1.0 : 1.0;
    Vec<D> dir{};
    if constexpr (D == 2) {
        double alpha = std::asin(2.0 * rng.uniform() - 1.0);
        int t = 1 - axis;
        dir[axis] = inward * std::cos(alpha);
        dir[t] = std::sin(alpha);
    } else {
        double ct = std::sqrt(rng.uniform());
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double beta = 2.0 * kPi * rng.uniform();
        int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        dir[axis] = inward * ct;
        dir[t1] = st * std::cos(beta);
        dir[t2] = st * std::sin(beta);
    }
    return dir;
}

template <int D>
inline Vec<D> rotate_to_cosine(const Vec<D>& dir, double mu, Philox& rng) {
    if constexpr (D == 2) {
        // rotation sign is a fair coin
        double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        if (rng.uniform() < 0.5) s = -s;
        Vec<2> nd{mu * dir[0] - s * dir[1], s * dir[0] + mu * dir[1]};
        return normalized<2>(nd);
    } else {
        double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        double phi = 2.0 * kPi * rng.uniform();
        // orthonormal frame around dir
        Vec<3> a = (std::abs(dir[0]) < 0.9) ? Vec<3>{1.0, 0.0, 0.0} : Vec<3>{0.0, 1.0, 0.0};
        Vec<3> e1{dir[1] * a[2] - dir[2] * a[1], dir[2] * a[0] - dir[0] * a[2],
                  dir[0] * a[1] - dir[1] * a[0]};
        e1 = normalized<3>(e1);
        Vec<3> e2{dir[1] * e1[2] - dir[2] * e1[1], dir[2] * e1[0] - dir[0] * e1[2],
                  dir[0] * e1[1] - dir[1] * e1[0]};
        Vec<3> nd;
        for (int i = 0; i < 3; ++i)
            nd[i] = mu * dir[i] + st * (std::cos(phi) * e1[i] + std::sin(phi) * e2[i]);
        return normalized<3>(nd);
    }
}

// isotropic scattering law, used when no angular table is attached
template <int D>
inline Vec<D> sample_isotropic(Philox& rng) {
    if constexpr (D == 2) {
        double th = 2.0 * kPi * rng.uniform();
        return Vec<2>{std::cos(th), std::sin(th)};
    } else {
        double mu = 2.0 * rng.uniform() - 1.0;
        double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        double phi = 2.0 * kPi * rng.uniform();
        return Vec<3>{st * std::cos(phi), st * std::sin(phi), mu};
    }
}

}  // namespace detail

template <int D>
inline PhotonPacket<D> launch_packet(const Scene<D>& scene, Philox& rng) {
    // pick an illuminated face proportional to its surface measure
    double total = 0.0;
    std::vector<double> meas(scene.illuminated.size());
    for (std::size_t i = 0; i < scene.illuminated.size(); ++i) {
        int axis = Scene<D>::face_axis(scene.illuminated[i]);
        double m = 1.0;
        for (int a = 0; a < D; ++a)
            if (a != axis) m *= scene.hi[a] - scene.lo[a];
        meas[i] = m;
        total += m;
    }
    int f = scene.illuminated.back();
    if (scene.illuminated.size() > 1) {
        double u = rng.uniform() * total, acc = 0.0;
        for (std::size_t i = 0; i < scene.illuminated.size(); ++i) {
            acc += meas[i];
            if (u < acc) { f = scene.illuminated[i]; break; }
        }
    }
    PhotonPacket<D> p;
    int axis = Scene<D>::face_axis(f);
    p.pos[axis] = Scene<D>::face_side(f) ? scene.hi[axis] : scene.lo[axis];
    for (int a = 0; a < D; ++a)
        if (a != axis) p.pos[a] = scene.lo[a] + rng.uniform() * (scene.hi[a] - scene.lo[a]);
    p.dir = detail::sample_launch_dir<D>(f, rng);
    p.corr_weight = cplx{1.0, 0.0};
    p.alive = true;
    return p;
}

/*
 * Phase bookkeeping at a scattering event inside the shifted region.  The
 * displacement in wavelength units is phase_scale * psi(x): the small regime
 * passes the mean free path as scale, the moderate regime passes 1.  In the
 * large regime any scattering inside the region fully decorrelates the pair,
 * which kills the cross weight outright.
 */
template <int D>
inline void update_correlation_weight(PhotonPacket<D>& p, const Vec<D>& old_dir,
                                      const Vec<D>& new_dir, const ShiftField<D>& shift,
                                      double phase_scale) {
    if (shift.regime == ShiftRegime::None || !shift.contains(p.pos)) return;
    if (shift.regime == ShiftRegime::Large) {
        p.corr_weight = cplx{0.0, 0.0};
        return;
    }
    if (p.corr_weight == cplx{0.0, 0.0}) return;
    Vec<D> psi = shift.psi(p.pos);
    double phase = phase_scale * dot<D>(sub<D>(new_dir, old_dir), psi);
    p.corr_weight *= cplx{std::cos(phase), std::sin(phase)};
}

// displacement-to-phase conversion factor for the configured regime
inline double regime_phase_scale(ShiftRegime regime, double mean_free_path) {
    return regime == ShiftRegime::Small ? mean_free_path : 1.0;
}

// advance to the next event (redrawing direction and weight on a scatter);
// out_face is set on exits
template <int D>
inline StepEvent step_packet(const Scene<D>& scene, const TransportCoefficients& coeffs,
                             const ScatterTable* table, PhotonPacket<D>& p, Philox& rng,
                             int& out_face) {
    const double eta = coeffs.mean_free_path;
    double s = -eta * std::log(rng.uniform_pos());

    double t_exit = std::numeric_limits<double>::infinity();
    int face = -1;
    for (int a = 0; a < D; ++a) {
        if (p.dir[a] > 0.0) {
            double t = (scene.hi[a] - p.pos[a]) / p.dir[a];
            if (t < t_exit) { t_exit = t; face = 2 * a + 1; }
        } else if (p.dir[a] < 0.0) {
            double t = (scene.lo[a] - p.pos[a]) / p.dir[a];
            if (t < t_exit) { t_exit = t; face = 2 * a; }
        }
    }
    if (face < 0) throw NumericalFailure("step_packet: direction degenerate");
    t_exit = std::max(t_exit, 0.0);

    double t_abs = std::numeric_limits<double>::infinity();
    for (const auto& ball : scene.absorbers) {
        Vec<D> oc = sub<D>(p.pos, ball.center);
        double b = dot<D>(oc, p.dir);
        double c = dot<D>(oc, oc) - ball.radius * ball.radius;
        double disc = b * b - c;
        if (disc <= 0.0) continue;
        double t = -b - std::sqrt(disc);
        if (t > 1e-13 && t < t_abs) t_abs = t;
    }

    if (s < t_exit && s < t_abs) {
        for (int a = 0; a < D; ++a) p.pos[a] += s * p.dir[a];
        Vec<D> old_dir = p.dir;
        if (table) {
            double mu = table->sample(rng);
            p.dir = detail::rotate_to_cosine<D>(old_dir, mu, rng);
        } else {
            p.dir = detail::sample_isotropic<D>(rng);
        }
        update_correlation_weight<D>(p, old_dir, p.dir, scene.shift,
                                     regime_phase_scale(scene.shift.regime, eta));
        return StepEvent::Scattered;
    }
    if (t_abs <= t_exit) {
        for (int a = 0; a < D; ++a) p.pos[a] += t_abs * p.dir[a];
        p.alive = false;
        return StepEvent::Absorbed;
    }
    for (int a = 0; a < D; ++a) p.pos[a] += t_exit * p.dir[a];
    int axis = Scene<D>::face_axis(face);
    p.pos[axis] = Scene<D>::face_side(face) ? scene.hi[axis] : scene.lo[axis];  // land exactly
    p.alive = false;
    out_face = face;

    bool measured = false;
    for (int g : scene.measured)
        if (g == face) { measured = true; break; }
    if (measured) {
        double cos_exit = p.dir[axis] * (Scene<D>::face_side(face) ? 1.0 : -1.0);
        if (cos_exit >= std::cos(scene.aperture_half_angle) - 1e-15)
            return StepEvent::ExitedMeasured;
    }
    return StepEvent::ExitedOther;
}

template <int D>
inline void run_block(const Scene<D>& scene, const TransportCoefficients& coeffs,
                      const ScatterTable* table, const RunParams& params, std::uint64_t idx_lo,
                      std::uint64_t idx_hi, BoundaryTally& tally) {
    tally.resize_faces(2 * D);

    for (std::uint64_t i = idx_lo; i < idx_hi; ++i) {
        Philox rng(params.seed, i);
        PhotonPacket<D> p = launch_packet<D>(scene, rng);
        ++tally.n_launched;
        std::uint64_t steps = 0;
        while (p.alive) {
            if (++steps > params.max_steps)
                throw NumericalFailure("run_transport: packet exceeded the step budget");
            int face = -1;
            switch (step_packet<D>(scene, coeffs, table, p, rng, face)) {
                case StepEvent::Scattered:
                    break;
                case StepEvent::ExitedMeasured: {
                    ++tally.n_measured;
                    tally.sum_w11 += 1.0;
                    tally.sum_w11_sq += 1.0;
                    double re = p.corr_weight.real(), im = p.corr_weight.imag();
                    tally.sum_w12 += p.corr_weight;
                    tally.sum_re12_sq += re * re;
                    tally.sum_im12_sq += im * im;
                    tally.sum_re12_im12 += re * im;
                    tally.face_w11[face] += 1.0;
                    tally.face_w12[face] += p.corr_weight;
                    break;
                }
                case StepEvent::ExitedOther:
                    ++tally.n_exited_other;
                    break;
                case StepEvent::Absorbed:
                    ++tally.n_absorbed;
                    break;
            }
        }
    }
}

namespace detail {

inline BoundaryTally reduce_pairwise(std::vector<BoundaryTally>& blocks, std::size_t lo,
                                     std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    std::size_t mid = lo + (hi - lo) / 2;
    BoundaryTally left = reduce_pairwise(blocks, lo, mid);
    BoundaryTally right = reduce_pairwise(blocks, mid, hi);
    left.merge(right);
    return left;
}

}  // namespace detail

/*
 * Deterministic parallel driver: packets are split into fixed 4096-wide
 * blocks, workers pull blocks off an atomic cursor, and the per-block
 * tallies are merged by a fixed-shape pairwise tree.  Per-packet streams
 * plus the fixed reduction order make the result bitwise independent of
 * n_workers and of scheduling.
 */
template <int D>
inline BoundaryTally run_transport(const Scene<D>& scene, const TransportCoefficients& coeffs,
                                   const ScatterTable* table, const RunParams& params) {
    scene.validate();
    if (params.n_packets == 0) throw InvalidInput("run_transport: n_packets must be positive");
    if (!(coeffs.mean_free_path > 0.0))
        throw DegenerateMedium("run_transport: nonpositive mean free path");
    if (!table && coeffs.anisotropy != 0.0)
        throw InvalidInput(
            "run_transport: anisotropic media need a spectrum-backed scattering table");
    if (table && table->dimension() != D)
        throw InvalidInput("run_transport: scattering table dimension mismatch");

    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t n_blocks = (params.n_packets + kBlock - 1) / kBlock;
    std::vector<BoundaryTally> blocks(n_blocks);

    int n_workers = std::max(1, params.n_workers);
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;

    auto worker = [&]() {
        try {
            for (;;) {
                std::uint64_t b = cursor.fetch_add(1);
                if (b >= n_blocks) return;
                std::uint64_t lo = b * kBlock;
                std::uint64_t hi = std::min(params.n_packets, lo + kBlock);
                run_block<D>(scene, coeffs, table, params, lo, hi, blocks[b]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    return detail::reduce_pairwise(blocks, 0, n_blocks);
}

}  // namespace specorr

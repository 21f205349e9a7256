#pragma once

#include <string>
#include <vector>

#include "specorr/core.hpp"

namespace specorr {

enum class ShiftRegime { None, Small, Moderate, Large };

// radial displacement profile inside the shifted region
enum class ShiftProfile {
    Bump,            // C1 quartic envelope, vanishing value/slope at both rims
    ConstantRadial,  // fixed amplitude along the radial direction
    Uniform,         // fixed amplitude along a fixed direction (divergence-free)
};

template <int D>
struct Ball {
    Vec<D> center{};
    double radius = 0.0;

    bool contains(const Vec<D>& x) const { return norm<D>(sub<D>(x, center)) < radius; }
};

// annular region; inner edge closed, outer edge open, disk when r_inner = 0
template <int D>
struct AnnularRegion {
    Vec<D> center{};
    double r_inner = 0.0;
    double r_outer = 0.0;

    bool contains(const Vec<D>& x) const {
        double r = norm<D>(sub<D>(x, center));
        return r >= r_inner && r < r_outer;
    }
};

/*
 * Localized displacement field.  The support is a union of annular regions
 * (first containing region wins); psi is the displacement expressed in
 * wavelength units, scaled back to a physical shift by the consumer
 * according to the regime.
 */
template <int D>
struct ShiftField {
    ShiftRegime regime = ShiftRegime::None;
    std::vector<AnnularRegion<D>> support;
    ShiftProfile profile = ShiftProfile::Bump;
    double amplitude = 1.0;
    Vec<D> uniform_dir{};  // only for ShiftProfile::Uniform

    bool contains(const Vec<D>& x) const {
        if (regime == ShiftRegime::None) return false;
        for (const auto& reg : support)
            if (reg.contains(x)) return true;
        return false;
    }

    // quartic bump 16 s^2 (1-s)^2 on [a,b], and its radial derivative
    static double bump(double s) { return 16.0 * s * s * (1.0 - s) * (1.0 - s); }
    static double bump_ds(double s) { return 32.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

    Vec<D> psi(const Vec<D>& x) const {
        Vec<D> zero{};
        if (regime == ShiftRegime::None) return zero;
        for (const auto& reg : support) {
            if (!reg.contains(x)) continue;
            if (profile == ShiftProfile::Uniform) return scale<D>(uniform_dir, amplitude);
            Vec<D> rel = sub<D>(x, reg.center);
            double r = norm<D>(rel);
            if (r <= 0.0) return zero;  // radial direction undefined at the center
            Vec<D> rhat = scale<D>(rel, 1.0 / r);
            if (profile == ShiftProfile::ConstantRadial) return scale<D>(rhat, amplitude);
            double s = (r - reg.r_inner) / (reg.r_outer - reg.r_inner);
            return scale<D>(rhat, amplitude * bump(s));
        }
        return zero;
    }

    // analytic divergence; for a radial profile p(r) r^ it is p' + (D-1) p / r.
    // Edge points evaluate as the limit from inside the region (edges closed
    // here on both rims for that purpose).
    double divergence(const Vec<D>& x) const {
        if (regime == ShiftRegime::None) return 0.0;
        for (const auto& reg : support) {
            double r = norm<D>(sub<D>(x, reg.center));
            if (r < reg.r_inner || r > reg.r_outer) continue;
            switch (profile) {
                case ShiftProfile::Uniform:
                    return 0.0;
                case ShiftProfile::ConstantRadial:
                    if (r <= 0.0) throw InvalidInput("shift divergence: singular at region center");
                    return (D - 1) * amplitude / r;
                case ShiftProfile::Bump: {
                    double w = reg.r_outer - reg.r_inner;
                    double s = (r - reg.r_inner) / w;
                    double p = amplitude * bump(s);
                    double dp = amplitude * bump_ds(s) / w;
                    if (r <= 0.0) return 0.0;  // bump vanishes at a centered disk's origin
                    return dp + (D - 1) * p / r;
                }
            }
        }
        return 0.0;
    }

    // smallest ball around each support entry, handy for nesting checks
    double outer_radius() const {
        double r = 0.0;
        for (const auto& reg : support) r = std::max(r, reg.r_outer);
        return r;
    }
};

/*
 * Boundary faces of the axis-aligned box are indexed 2*axis + side with
 * side 0 at the lower bound.  d=2: 0 left, 1 right, 2 bottom, 3 top;
 * d=3 adds 4 back, 5 front (z).
 */
template <int D>
struct Scene {
    Vec<D> lo{}, hi{};
    std::vector<int> illuminated;  // face indices
    std::vector<int> measured;
    double aperture_half_angle = 0.5 * kPi;
    std::vector<Ball<D>> absorbers;
    ShiftField<D> shift;

    static int face_axis(int f) { return f / 2; }
    static int face_side(int f) { return f % 2; }

    Vec<D> outward_normal(int f) const {
        Vec<D> n{};
        n[face_axis(f)] = face_side(f) ? 1.0 : -1.0;
        return n;
    }

    void validate() const {
        for (int a = 0; a < D; ++a)
            if (!(lo[a] < hi[a])) throw InvalidScene("scene: box must have positive extent");
        if (illuminated.empty()) throw InvalidScene("scene: no illuminated boundary");
        if (measured.empty()) throw InvalidScene("scene: no measured boundary");
        for (int f : illuminated) {
            if (f < 0 || f >= 2 * D) throw InvalidScene("scene: bad illuminated face index");
            for (int g : measured)
                if (f == g)
                    throw InvalidScene("scene: illuminated and measured boundaries intersect");
        }
        for (int g : measured)
            if (g < 0 || g >= 2 * D) throw InvalidScene("scene: bad measured face index");
        if (!(aperture_half_angle > 0.0 && aperture_half_angle <= 0.5 * kPi + 1e-15))
            throw InvalidScene("scene: aperture half-angle must lie in (0, pi/2]");
        for (const auto& b : absorbers) {
            if (!(b.radius > 0.0)) throw InvalidScene("scene: absorber radius must be positive");
            for (int a = 0; a < D; ++a)
                if (!(b.center[a] - b.radius > lo[a] && b.center[a] + b.radius < hi[a]))
                    throw InvalidScene("scene: absorber must lie strictly inside the domain");
        }
        for (const auto& reg : shift.support)
            if (!(reg.r_outer > reg.r_inner) || reg.r_inner < 0.0)
                throw InvalidScene("scene: shift region needs 0 <= r_inner < r_outer");
        if (shift.profile == ShiftProfile::Uniform && shift.regime != ShiftRegime::None)
            check_unit<D>(shift.uniform_dir, "scene shift direction");
    }
};

template <int D>
inline bool contains_shift(const Scene<D>& scene, const Vec<D>& x) {
    return scene.shift.contains(x);
}

/*
 * Shift supports for a sweep over expanding circular fronts.  Step n covers
 * the union of the fronts of thickness `thickness` at the two instants
 * r_{n-1} and r_n: one annulus [max(0, r_{n-1} - thickness), r_n) when they
 * overlap, two separate bands when the front moved further than its own
 * thickness.  The first step uses its own radius as the previous instant,
 * so a lone radius r with thickness >= r degenerates to the full disk.
 */
template <int D>
inline std::vector<ShiftField<D>> wavefront_sequence(const Vec<D>& center,
                                                     const std::vector<double>& radii,
                                                     double thickness = 0.1,
                                                     ShiftRegime regime = ShiftRegime::Large) {
    if (!(thickness > 0.0)) throw InvalidInput("wavefront_sequence: thickness must be positive");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw InvalidInput("wavefront_sequence: radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1]))
            throw InvalidInput("wavefront_sequence: radii must be strictly increasing");
    }
    std::vector<ShiftField<D>> out;
    out.reserve(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        // entry n is the union of the band at the previous instant and the
        // band at this one; they merge into one annulus unless the front
        // moved by more than its own thickness
        double prev = (i == 0) ? radii[0] : radii[i - 1];
        ShiftField<D> f;
        f.regime = regime;
        double lead_inner = std::max(0.0, radii[i] - thickness);
        if (lead_inner <= prev) {
            f.support.push_back({center, std::max(0.0, prev - thickness), radii[i]});
        } else {
            f.support.push_back({center, std::max(0.0, prev - thickness), prev});
            f.support.push_back({center, lead_inner, radii[i]});
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace specorr

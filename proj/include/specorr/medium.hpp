#pragma once

#include <algorithm>
#include <memory>
#include <utility>
#include <vector>

// pchip.hpp calls isnan unqualified; boost::math::isnan must be visible first
#include <boost/math/special_functions/fpclassify.hpp>

#include <boost/math/interpolators/pchip.hpp>

#include "specorr/core.hpp"
#include "specorr/quadrature.hpp"
#include "specorr/rng.hpp"

namespace specorr {

/*
 * Medium statistics enter only through the power spectrum R^(|xi|) of the
 * refractive-index correlation.  The differential scattering kernel between
 * unit directions p and k at wavenumber |k| is
 *
 *     sigma(p,k) = 2 pi |k|^{d-3} R^(|p-k| |k|),
 *
 * so everything reduces to one scalar profile of the scattering angle.
 */
class SpectrumModel {
public:
    enum class Kind { Gaussian, Isotropic, Tabulated };

    static SpectrumModel gaussian(int dimension, double corr_length) {
        if (dimension != 2 && dimension != 3)
            throw InvalidInput("spectrum: dimension must be 2 or 3");
        if (!(corr_length > 0.0))
            throw InvalidInput("spectrum: correlation length must be positive");
        SpectrumModel m;
        m.kind_ = Kind::Gaussian;
        m.dim_ = dimension;
        m.corr_length_ = corr_length;
        return m;
    }

    static SpectrumModel isotropic(int dimension, double level) {
        if (dimension != 2 && dimension != 3)
            throw InvalidInput("spectrum: dimension must be 2 or 3");
        if (level < 0.0) throw InvalidInput("spectrum: level must be nonnegative");
        SpectrumModel m;
        m.kind_ = Kind::Isotropic;
        m.dim_ = dimension;
        m.level_ = level;
        return m;
    }

    static SpectrumModel tabulated(int dimension, std::vector<double> xi,
                                   std::vector<double> density) {
        if (dimension != 2 && dimension != 3)
            throw InvalidInput("spectrum: dimension must be 2 or 3");
        if (xi.size() != density.size() || xi.size() < 4)
            throw InvalidInput("spectrum: tabulated model needs >= 4 (wavenumber, density) samples");
        if (xi.front() < 0.0)
            throw InvalidInput("spectrum: tabulated wavenumbers must be nonnegative");
        for (std::size_t i = 1; i < xi.size(); ++i)
            if (!(xi[i] > xi[i - 1]))
                throw InvalidInput("spectrum: tabulated wavenumbers must be strictly increasing");
        for (double v : density)
            if (v < 0.0) throw InvalidInput("spectrum: tabulated density must be nonnegative");
        SpectrumModel m;
        m.kind_ = Kind::Tabulated;
        m.dim_ = dimension;
        m.xi_lo_ = xi.front();
        m.xi_hi_ = xi.back();
        m.dens_lo_ = density.front();
        m.dens_hi_ = density.back();
        auto xs = xi, ys = density;  // interpolator consumes its inputs
        m.interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
            std::move(xs), std::move(ys));
        return m;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    double corr_length() const { return corr_length_; }

    // R^(xi); monotone-cubic tables are clamped at 0 and extended flat
    double density(double xi) const {
        if (xi < 0.0) throw InvalidInput("spectrum density: wavenumber must be nonnegative");
        switch (kind_) {
            case Kind::Isotropic:
                return level_;
            case Kind::Gaussian: {
                double l2 = corr_length_ * corr_length_;
                return std::pow(l2 / (2.0 * kPi), 0.5 * dim_) * std::exp(-0.5 * l2 * xi * xi);
            }
            case Kind::Tabulated: {
                if (xi <= xi_lo_) return dens_lo_;
                if (xi >= xi_hi_) return dens_hi_;
                return std::max(0.0, (*interp_)(xi));
            }
        }
        throw NumericalFailure("spectrum density: unreachable");
    }

private:
    SpectrumModel() = default;

    Kind kind_ = Kind::Isotropic;
    int dim_ = 2;
    double corr_length_ = 0.0;
    double level_ = 0.0;
    double xi_lo_ = 0.0, xi_hi_ = 0.0, dens_lo_ = 0.0, dens_hi_ = 0.0;
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

// kernel as a function of the scattering cosine mu = p.k
inline double sigma_mu(const SpectrumModel& m, double mu, double k_mag) {
    if (!(k_mag > 0.0)) throw InvalidInput("sigma: wavenumber must be positive");
    mu = std::clamp(mu, -1.0, 1.0);
    double xi = k_mag * std::sqrt(std::max(0.0, 2.0 - 2.0 * mu));
    return 2.0 * kPi * std::pow(k_mag, m.dimension() - 3) * m.density(xi);
}

template <int D>
inline double sigma_differential(const SpectrumModel& m, const Vec<D>& p_hat,
                                 const Vec<D>& k_hat, double k_mag) {
    static_assert(D == 2 || D == 3);
    if (m.dimension() != D) throw InvalidInput("sigma: direction dimension mismatch");
    check_unit<D>(p_hat, "sigma");
    check_unit<D>(k_hat, "sigma");
    return sigma_mu(m, dot<D>(p_hat, k_hat), k_mag);
}

// total cross section: integrate the kernel over the outgoing sphere.  The
// polar substitution mu = cos t removes the (1-mu^2)^{(d-3)/2} endpoint
// singularity of the d=2 weight.
inline double sigma_total(const SpectrumModel& m, double k_mag) {
    const int d = m.dimension();
    double v = integrate_adaptive(
        [&](double t) {
            double s = sigma_mu(m, std::cos(t), k_mag);
            return (d == 3) ? s * std::sin(t) : s;
        },
        0.0, kPi, 1e-13);
    v *= polar_weight(d);
    if (!(v > 0.0) || !std::isfinite(v))
        throw DegenerateMedium("sigma_total: spectrum has no scattering at this wavenumber");
    return v;
}

// normalized phase function f(mu) = sigma(mu)/Sigma
struct PhaseFunction {
    SpectrumModel model;
    double k_mag;
    double sigma_t;
    double operator()(double mu) const { return sigma_mu(model, mu, k_mag) / sigma_t; }
};

inline PhaseFunction phase_function(const SpectrumModel& m, double k_mag) {
    return PhaseFunction{m, k_mag, sigma_total(m, k_mag)};
}

// mean scattering cosine g = int f(mu) mu over the sphere
inline double anisotropy_g(const SpectrumModel& m, double k_mag) {
    if (m.kind() == SpectrumModel::Kind::Isotropic) return 0.0;  // symmetric kernel
    const int d = m.dimension();
    auto moment = [&](int pow_mu) {
        return integrate_adaptive(
            [&](double t) {
                double c = std::cos(t);
                double s = sigma_mu(m, c, k_mag) * (pow_mu ? c : 1.0);
                return (d == 3) ? s * std::sin(t) : s;
            },
            0.0, kPi, 1e-13);
    };
    double m0 = moment(0);
    if (!(m0 > 0.0)) throw DegenerateMedium("anisotropy_g: spectrum has no scattering");
    return moment(1) / m0;
}

struct TransportCoefficients {
    int dimension = 2;
    double k_mag = 0.0;
    double sigma_total = 0.0;
    double mean_free_path = 0.0;  // eta = 1/sigma_total
    double anisotropy = 0.0;      // g
    double diffusion_scalar = 0.0;  // sphere_area(d) / (d (1-g))
};

inline TransportCoefficients compute_coefficients(const SpectrumModel& m, double k_mag) {
    TransportCoefficients c;
    c.dimension = m.dimension();
    c.k_mag = k_mag;
    c.sigma_total = sigma_total(m, k_mag);
    c.mean_free_path = 1.0 / c.sigma_total;
    c.anisotropy = anisotropy_g(m, k_mag);
    if (!(c.anisotropy > -1.0 && c.anisotropy < 1.0))
        throw NearSingularTransport("coefficients: anisotropy outside (-1,1)");
    c.diffusion_scalar = sphere_area(c.dimension) / (c.dimension * (1.0 - c.anisotropy));
    return c;
}

// media specified by (Sigma, g) directly, with no angular law attached
inline TransportCoefficients synthetic_coefficients(int dimension, double sigma_t, double g) {
    if (dimension != 2 && dimension != 3)
        throw InvalidInput("coefficients: dimension must be 2 or 3");
    if (!(sigma_t > 0.0)) throw DegenerateMedium("coefficients: sigma_total must be positive");
    if (!(g > -1.0 && g < 1.0))
        throw NearSingularTransport("coefficients: anisotropy outside (-1,1)");
    TransportCoefficients c;
    c.dimension = dimension;
    c.k_mag = 0.0;
    c.sigma_total = sigma_t;
    c.mean_free_path = 1.0 / sigma_t;
    c.anisotropy = g;
    c.diffusion_scalar = sphere_area(dimension) / (dimension * (1.0 - g));
    return c;
}

// solution of the linear-in-direction integral identity used by the
// diffusion limit; blows up as g -> 1
template <int D>
inline Vec<D> h_vector(const TransportCoefficients& c, const Vec<D>& k_hat) {
    check_unit<D>(k_hat, "h_vector");
    if (c.anisotropy >= 1.0 - 1e-12)
        throw NearSingularTransport("h_vector: anisotropy too close to 1");
    return scale<D>(k_hat, -1.0 / (1.0 - c.anisotropy));
}

/*
 * Inverse-CDF sampler for the scattering cosine.  In d=3 the cosine density
 * is f(mu) itself; in d=2 we tabulate the polar angle on [0,pi] (density
 * f(cos t), no endpoint singularity) and return its cosine, the consumer
 * draws the rotation sign.  4096 equiprobable bins, linear interpolation.
 */
class ScatterTable {
public:
    static constexpr int kBins = 4096;

    ScatterTable(const SpectrumModel& m, double k_mag) : dim_(m.dimension()) {
        const int fine = 1 << 16;
        std::vector<double> grid(fine + 1), cdf(fine + 1);
        double a = (dim_ == 3) ? -1.0 : 0.0;
        double b = (dim_ == 3) ? 1.0 : kPi;
        double h = (b - a) / fine;
        auto dens = [&](double s) {
            return (dim_ == 3) ? sigma_mu(m, s, k_mag) : sigma_mu(m, std::cos(s), k_mag);
        };
        cdf[0] = 0.0;
        grid[0] = a;
        double prev = dens(a);
        for (int i = 1; i <= fine; ++i) {
            grid[i] = a + i * h;
            double cur = dens(grid[i]);
            cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
            prev = cur;
        }
        double total = cdf[fine];
        if (!(total > 0.0)) throw DegenerateMedium("scatter table: zero total cross section");
        // invert: value at each equiprobable quantile
        table_.resize(kBins + 1);
        int j = 0;
        for (int i = 0; i <= kBins; ++i) {
            double target = total * i / kBins;
            while (j < fine && cdf[j + 1] < target) ++j;
            double seg = cdf[j + 1] - cdf[j];
            double frac = (seg > 0.0) ? (target - cdf[j]) / seg : 0.0;
            table_[i] = grid[j] + frac * h;
        }
        table_.front() = a;
        table_.back() = b;
    }

    // scattering cosine, given a uniform draw
    double sample(double u) const {
        double t = u * kBins;
        int i = std::min(static_cast<int>(t), kBins - 1);
        double v = table_[i] + (t - i) * (table_[i + 1] - table_[i]);
        return (dim_ == 3) ? std::clamp(v, -1.0, 1.0) : std::cos(v);
    }

    double sample(Philox& rng) const { return sample(rng.uniform()); }

    int dimension() const { return dim_; }

private:
    int dim_;
    std::vector<double> table_;
};

}  // namespace specorr

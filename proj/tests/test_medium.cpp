#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <specorr/medium.hpp>
#include <specorr/quadrature.hpp>
#include <specorr/rng.hpp>

using namespace specorr;

namespace {

// frozen reference values for the Gaussian spectrum, computed from the
// closed forms with Bessel/coth expressions under independent software
struct GaussianCase {
    int dim;
    double ell, k;
    double sigma, g;
};

const GaussianCase kGaussianTable[] = {
    {2, 1.0, 1.0, 2.92645392311009, 0.446389965896535},
    {2, 0.5, 2.0, 0.365806740388761, 0.446389965896535},
    {2, 2.0, 1.5, 2.2612685384422, 0.942689923739704},
    {3, 1.0, 1.0, 2.16739302711491, 0.313035285499331},
    {3, 1.5, 2.0, 0.939985588670663, 0.888888919348849},
};

// 1D Fourier factor of the separable Gaussian correlation
double gauss_line_transform(double ell, double s) {
    return integrate_adaptive(
               [&](double x) { return std::exp(-0.5 * x * x / (ell * ell)) * std::cos(s * x); },
               0.0, 12.0 * ell) /
           kPi;  // half-line doubled, then 1/(2 pi)
}

}  // namespace

TEST_CASE("gaussian spectral density against direct Fourier quadrature") {
    for (int dim : {2, 3}) {
        double ell = 0.8;
        SpectrumModel m = SpectrumModel::gaussian(dim, ell);
        for (double xi : {0.0, 0.5, 1.3, 2.7}) {
            // align xi with the first axis; the transform factorizes
            double expect = gauss_line_transform(ell, xi);
            for (int a = 1; a < dim; ++a) expect *= gauss_line_transform(ell, 0.0);
            CHECK(m.density(xi) == Catch::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("total cross-section and anisotropy match frozen oracles") {
    for (const auto& gc : kGaussianTable) {
        SpectrumModel m = SpectrumModel::gaussian(gc.dim, gc.ell);
        double sigma = sigma_total(m, gc.k);
        double g = anisotropy_g(m, gc.k);
        CHECK(sigma == Catch::Approx(gc.sigma).epsilon(1e-10));
        CHECK(std::abs(g - gc.g) < 1e-8);
    }
}

TEST_CASE("isotropic kernel closed forms") {
    double c = 0.7;
    SpectrumModel m2 = SpectrumModel::isotropic(2, c);
    SpectrumModel m3 = SpectrumModel::isotropic(3, c);
    double k = 1.7;
    // sigma(mu) = 2 pi k^{d-3} c integrated over the unit sphere of directions
    CHECK(sigma_total(m2, k) == Catch::Approx(4.0 * kPi * kPi * c / k).epsilon(1e-12));
    CHECK(sigma_total(m3, k) == Catch::Approx(8.0 * kPi * kPi * c).epsilon(1e-12));
    CHECK(anisotropy_g(m2, k) == 0.0);  // short-circuit, not quadrature
    CHECK(anisotropy_g(m3, k) == 0.0);
}

TEST_CASE("differential kernel is the density evaluated at the transfer wavenumber") {
    SpectrumModel m = SpectrumModel::gaussian(2, 1.0);
    double k = 1.3;
    Vec<2> k_hat{1.0, 0.0};
    Vec<2> p_hat{0.0, 1.0};  // mu = 0, |p - k| = sqrt(2)
    double expect = 2.0 * kPi * std::pow(k, -1.0) * m.density(std::sqrt(2.0) * k);
    CHECK(sigma_differential<2>(m, p_hat, k_hat, k) == Catch::Approx(expect).epsilon(1e-13));

    SpectrumModel m3 = SpectrumModel::gaussian(3, 1.0);
    Vec<3> k3{0.0, 0.0, 1.0};
    Vec<3> p3{0.0, 1.0, 0.0};
    double expect3 = 2.0 * kPi * m3.density(std::sqrt(2.0) * k);
    CHECK(sigma_differential<3>(m3, p3, k3, k) == Catch::Approx(expect3).epsilon(1e-13));
}

TEST_CASE("phase function normalizes to one") {
    for (const auto& gc : kGaussianTable) {
        SpectrumModel m = SpectrumModel::gaussian(gc.dim, gc.ell);
        PhaseFunction f = phase_function(m, gc.k);
        double total;
        if (gc.dim == 2) {
            total = integrate_adaptive([&](double t) { return f(std::cos(t)); }, 0.0,
                                       2.0 * kPi);
        } else {
            total = 2.0 * kPi *
                    integrate_adaptive([&](double mu) { return f(mu); }, -1.0, 1.0);
        }
        CHECK(total == Catch::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("gaussian kernel prefers forward scattering") {
    SpectrumModel m = SpectrumModel::gaussian(2, 1.0);
    PhaseFunction f = phase_function(m, 1.0);
    CHECK(f(1.0) > f(0.0));
    CHECK(f(0.0) > f(-1.0));
}

TEST_CASE("transport coefficients are mutually consistent") {
    SpectrumModel m = SpectrumModel::gaussian(3, 1.0);
    TransportCoefficients c = compute_coefficients(m, 1.0);
    CHECK(c.mean_free_path == 1.0 / c.sigma_total);  // same expression, exact
    CHECK(c.diffusion_scalar ==
          Catch::Approx(sphere_area(3) / (3.0 * (1.0 - c.anisotropy))).epsilon(1e-14));
    CHECK(c.dimension == 3);
    CHECK(c.k_mag == 1.0);

    TransportCoefficients s = synthetic_coefficients(2, 20.0, 0.0);
    CHECK(s.sigma_total == 20.0);
    CHECK(s.mean_free_path == 1.0 / 20.0);
    CHECK(s.anisotropy == 0.0);
}

TEST_CASE("degenerate media are rejected") {
    CHECK_THROWS_AS(SpectrumModel::gaussian(4, 1.0), InvalidInput);
    CHECK_THROWS_AS(SpectrumModel::gaussian(2, 0.0), InvalidInput);
    CHECK_THROWS_AS(SpectrumModel::isotropic(2, -1.0), InvalidInput);
    CHECK_THROWS_AS(synthetic_coefficients(2, 0.0, 0.0), DegenerateMedium);
    CHECK_THROWS_AS(synthetic_coefficients(2, 1.0, 1.0), NearSingularTransport);
    CHECK_THROWS_AS(synthetic_coefficients(4, 1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(sigma_mu(SpectrumModel::gaussian(2, 1.0), 0.0, 0.0), InvalidInput);

    // an identically-zero table scatters nothing
    std::vector<double> xi{0.0, 1.0, 2.0, 3.0};
    std::vector<double> zero{0.0, 0.0, 0.0, 0.0};
    SpectrumModel dead = SpectrumModel::tabulated(2, xi, zero);
    CHECK_THROWS_AS(sigma_total(dead, 1.0), DegenerateMedium);
}

TEST_CASE("appendix identity: first angular moment of the kernel") {
    // integrating q-hat against the phase function returns g p-hat, the
    // vector form behind the h-field inversion
    struct Setup {
        int dim;
        SpectrumModel m;
    };
    std::vector<Setup> setups;
    setups.push_back({2, SpectrumModel::gaussian(2, 1.0)});
    setups.push_back({2, SpectrumModel::isotropic(2, 0.5)});
    setups.push_back({3, SpectrumModel::gaussian(3, 1.0)});
    setups.push_back({3, SpectrumModel::isotropic(3, 0.5)});

    for (const auto& s : setups) {
        double k = 1.0;
        PhaseFunction f = phase_function(s.m, k);
        double g = anisotropy_g(s.m, k);
        TransportCoefficients c = compute_coefficients(s.m, k);

        double worst = 0.0;
        const int n_dir = 64;
        if (s.dim == 2) {
            QuadRule rule = gauss_legendre(96, 0.0, 2.0 * kPi);
            for (int i = 0; i < n_dir; ++i) {
                double a = 2.0 * kPi * i / n_dir;
                Vec<2> p{std::cos(a), std::sin(a)};
                Vec<2> h = h_vector<2>(c, p);
                for (int comp = 0; comp < 2; ++comp) {
                    double kh = 0.0;
                    for (std::size_t q = 0; q < rule.x.size(); ++q) {
                        Vec<2> qh{std::cos(rule.x[q]), std::sin(rule.x[q])};
                        double hq = (comp == 0 ? -qh[0] : -qh[1]) / (1.0 - g);
                        kh += rule.w[q] * f(dot<2>(p, qh)) * hq;
                    }
                    worst = std::max(worst, std::abs(kh - h[comp] - p[comp]));
                }
            }
        } else {
            QuadRule mu_rule = gauss_legendre(96, -1.0, 1.0);
            const int n_phi = 96;
            for (int i = 0; i < n_dir; ++i) {
                double a = kPi * (i + 0.5) / n_dir;
                double b = 2.0 * kPi * i / n_dir;
                Vec<3> p{std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a)};
                Vec<3> h = h_vector<3>(c, p);
                // frame around p
                Vec<3> ref = std::abs(p[0]) < 0.9 ? Vec<3>{1, 0, 0} : Vec<3>{0, 1, 0};
                Vec<3> e1 = normalized<3>(
                    Vec<3>{p[1] * ref[2] - p[2] * ref[1], p[2] * ref[0] - p[0] * ref[2],
                           p[0] * ref[1] - p[1] * ref[0]});
                Vec<3> e2{p[1] * e1[2] - p[2] * e1[1], p[2] * e1[0] - p[0] * e1[2],
                          p[0] * e1[1] - p[1] * e1[0]};
                for (int comp = 0; comp < 3; ++comp) {
                    double kh = 0.0;
                    for (std::size_t q = 0; q < mu_rule.x.size(); ++q) {
                        double mu = mu_rule.x[q];
                        double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                        double fq = f(mu);
                        for (int t = 0; t < n_phi; ++t) {
                            double ph = 2.0 * kPi * t / n_phi;
                            double qc = mu * p[comp] +
                                        st * (std::cos(ph) * e1[comp] + std::sin(ph) * e2[comp]);
                            kh += mu_rule.w[q] * (2.0 * kPi / n_phi) * fq * (-qc / (1.0 - g));
                        }
                    }
                    worst = std::max(worst, std::abs(kh - h[comp] - p[comp]));
                }
            }
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("scatter table matches the kernel law") {
    // empirical CDF of 10^6 table draws against quadrature of the density
    struct TableCase {
        int dim;
        SpectrumModel m;
        double k;
    };
    std::vector<TableCase> cases;
    cases.push_back({2, SpectrumModel::gaussian(2, 1.0), 1.0});
    cases.push_back({3, SpectrumModel::gaussian(3, 1.0), 1.0});

    for (const auto& tc : cases) {
        ScatterTable table(tc.m, tc.k);
        CHECK(table.dimension() == tc.dim);
        PhaseFunction f = phase_function(tc.m, tc.k);

        const int n_draw = 1000000;
        Philox rng(987, 0);
        std::vector<double> draws(n_draw);
        double mean = 0.0;
        for (int i = 0; i < n_draw; ++i) {
            double mu = table.sample(rng);
            REQUIRE(mu >= -1.0);
            REQUIRE(mu <= 1.0);
            draws[i] = mu;
            mean += mu;
        }
        mean /= n_draw;
        std::sort(draws.begin(), draws.end());

        // reference CDF of the scattering cosine
        auto cdf = [&](double m) {
            if (tc.dim == 3)
                return integrate_adaptive([&](double u) { return 2.0 * kPi * f(u); }, -1.0, m);
            // planar: theta in [0, pi] carries density 2 f(cos theta)
            double th = std::acos(std::clamp(m, -1.0, 1.0));
            return integrate_adaptive([&](double t) { return 2.0 * f(std::cos(t)); }, th, kPi);
        };

        double ks = 0.0;
        for (int j = 1; j < 40; ++j) {
            double m = -1.0 + 2.0 * j / 40.0;
            double emp =
                static_cast<double>(std::lower_bound(draws.begin(), draws.end(), m) -
                                    draws.begin()) /
                n_draw;
            ks = std::max(ks, std::abs(emp - cdf(m)));
        }
        CHECK(ks < 0.002);

        // sample mean of the cosine estimates g
        double g = anisotropy_g(tc.m, tc.k);
        double var = 0.0;
        for (double d : draws) var += (d - mean) * (d - mean);
        var /= n_draw;
        CHECK(std::abs(mean - g) < 3.0 * std::sqrt(var / n_draw));
    }
}

TEST_CASE("sharply peaked tabulated spectrum is strongly forward") {
    // density concentrated near zero momentum transfer => g close to 1
    std::vector<double> xi, dens;
    for (int i = 0; i <= 200; ++i) {
        double x = 0.001 * i;
        xi.push_back(x);
        dens.push_back(std::exp(-(x / 0.02) * (x / 0.02)));
    }
    SpectrumModel m = SpectrumModel::tabulated(3, xi, dens);
    double g = anisotropy_g(m, 1.0);
    CHECK(g >= 0.999);
    CHECK(g < 1.0);
    // the h-field magnitude diverges as 1/(1-g)
    TransportCoefficients c = compute_coefficients(m, 1.0);
    Vec<3> h = h_vector<3>(c, Vec<3>{0.0, 0.0, 1.0});
    CHECK(-h[2] == Catch::Approx(1.0 / (1.0 - g)).epsilon(1e-12));
    CHECK(-h[2] > 1000.0);

    // and the guard itself trips right at the edge
    TransportCoefficients edge = synthetic_coefficients(3, 1.0, 1.0 - 1e-13);
    CHECK_THROWS_AS(h_vector<3>(edge, Vec<3>{0.0, 0.0, 1.0}), NearSingularTransport);
}

TEST_CASE("tabulated model clamps outside the table") {
    std::vector<double> xi{0.0, 0.5, 1.0, 1.5};
    std::vector<double> dens{2.0, 1.5, 1.0, 0.5};
    SpectrumModel m = SpectrumModel::tabulated(2, xi, dens);
    CHECK(m.density(0.0) == 2.0);
    CHECK(m.density(9.0) == 0.5);
    CHECK_THROWS_AS(m.density(-0.1), InvalidInput);

    CHECK_THROWS_AS(SpectrumModel::tabulated(2, {0.0, 1.0}, {1.0, 1.0}), InvalidInput);
    CHECK_THROWS_AS(SpectrumModel::tabulated(2, {0.0, 1.0, 1.0, 2.0}, {1, 1, 1, 1}),
                    InvalidInput);
    CHECK_THROWS_AS(SpectrumModel::tabulated(2, {0.0, 1.0, 2.0, 3.0}, {1, 1, -1, 1}),
                    InvalidInput);
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <specorr/core.hpp>
#include <specorr/fft.hpp>
#include <specorr/quadrature.hpp>

using namespace specorr;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    // an n-point rule is exact through degree 2n-1
    for (int n : {4, 16, 64}) {
        QuadRule rule = gauss_legendre(n);
        REQUIRE(rule.x.size() == static_cast<std::size_t>(n));
        double w_sum = 0.0;
        for (double w : rule.w) w_sum += w;
        CHECK(std::abs(w_sum - 2.0) < 1e-14);

        int deg = 2 * n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += rule.w[i] * std::pow(rule.x[i], deg - 1);
        // x^(deg-1) has even degree here, integral over [-1,1] = 2/(deg)
        CHECK(std::abs(acc - 2.0 / deg) < 1e-12);
    }
}

TEST_CASE("gauss-legendre nodes are symmetric and sorted") {
    QuadRule rule = gauss_legendre(32);
    for (std::size_t i = 1; i < rule.x.size(); ++i) CHECK(rule.x[i] > rule.x[i - 1]);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        CHECK(std::abs(rule.x[i] + rule.x[rule.x.size() - 1 - i]) < 1e-14);
        CHECK(std::abs(rule.w[i] - rule.w[rule.w.size() - 1 - i]) < 1e-14);
    }
}

TEST_CASE("mapped rule integrates over [a,b]") {
    QuadRule rule = gauss_legendre(24, 0.0, kPi);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * std::sin(rule.x[i]);
    CHECK(std::abs(acc - 2.0) < 1e-13);
}

TEST_CASE("adaptive quadrature on known integrals") {
    // references are the truncated integrals: the tail beyond the cut is
    // part of the exact answer, not quadrature error
    double a = integrate_adaptive([](double x) { return std::exp(-x * x); }, 0.0, 5.0);
    CHECK(std::abs(a - 0.5 * std::sqrt(kPi) * std::erf(5.0)) < 1e-12);

    double b = integrate_adaptive([](double x) { return 1.0 / (1.0 + x * x); }, -1.0, 1.0);
    CHECK(std::abs(b - 0.5 * kPi) < 1e-12);

    // mildly peaked integrand
    double c = integrate_adaptive([](double x) { return std::exp(-50.0 * (x - 0.3) * (x - 0.3)); },
                                  0.0, 1.0);
    double s = std::sqrt(50.0);
    double c_exact = 0.5 * std::sqrt(kPi / 50.0) * (std::erf(0.3 * s) + std::erf(0.7 * s));
    CHECK(std::abs(c - c_exact) < 1e-12);
}

TEST_CASE("invalid quadrature arguments throw") {
    CHECK_THROWS_AS(gauss_legendre(0), InvalidInput);
    CHECK_THROWS_AS(gauss_legendre(8, 1.0, 1.0), InvalidInput);
}

TEST_CASE("fft round trip and delta spectrum") {
    const int n = 64;
    std::vector<cplx> v(n);
    // deterministic pseudo-data, no rng needed
    for (int i = 0; i < n; ++i) v[i] = cplx(std::sin(0.37 * i + 0.1), std::cos(1.3 * i));
    std::vector<cplx> orig = v;
    fft_pow2(v, -1);
    fft_pow2(v, +1);
    for (int i = 0; i < n; ++i) {
        CHECK(std::abs(v[i].real() / n - orig[i].real()) < 1e-12);
        CHECK(std::abs(v[i].imag() / n - orig[i].imag()) < 1e-12);
    }

    // unit impulse transforms to the flat spectrum
    std::vector<cplx> d(n, cplx(0.0, 0.0));
    d[0] = cplx(1.0, 0.0);
    fft_pow2(d, -1);
    for (int i = 0; i < n; ++i) CHECK(std::abs(d[i] - cplx(1.0, 0.0)) < 1e-13);
}

TEST_CASE("fft matches a single tone") {
    const int n = 32;
    const int j = 5;
    std::vector<cplx> v(n);
    for (int i = 0; i < n; ++i) {
        double ph = 2.0 * kPi * j * i / n;
        v[i] = cplx(std::cos(ph), std::sin(ph));
    }
    fft_pow2(v, -1);  // forward: e^{-2 pi i k n / N}
    for (int l = 0; l < n; ++l) {
        double expect = (l == j) ? static_cast<double>(n) : 0.0;
        CHECK(std::abs(v[l] - cplx(expect, 0.0)) < 1e-11);
    }
}

TEST_CASE("fft rejects non-power-of-two input") {
    std::vector<cplx> v(24, cplx(1.0, 0.0));
    CHECK_THROWS_AS(fft_pow2(v, -1), InvalidInput);
}

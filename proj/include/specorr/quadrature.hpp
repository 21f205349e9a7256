#pragma once

#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "specorr/core.hpp"

namespace specorr {

struct QuadRule {
    std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on the
// three-term recurrence.  Arbitrary n (we need 64 and 256 at runtime).
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw InvalidInput("gauss_legendre: n must be positive");
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess for the i-th root (descending)
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

inline QuadRule gauss_legendre(int n, double a, double b) {
    if (!(b > a)) throw InvalidInput("gauss_legendre: interval must have positive length");
    QuadRule r = gauss_legendre(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = mid + half * r.x[i];
        r.w[i] *= half;
    }
    return r;
}

// adaptive Gauss-Kronrod, relative target; used for the cross-section and
// anisotropy integrals
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol = 1e-12) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 18, rel_tol, &err);
    if (!(std::isfinite(v)))
        throw NumericalFailure("integrate_adaptive: non-finite result");
    return v;
}

}  // namespace specorr

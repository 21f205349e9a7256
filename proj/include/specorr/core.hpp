#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace specorr {

inline constexpr const char* kVersion = "1.0.0";

using cplx = std::complex<double>;

// error taxonomy shared by all modules
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& m) : std::runtime_error(m) {}
};
struct InvalidScene : std::runtime_error {
    explicit InvalidScene(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateMedium : std::runtime_error {
    explicit DegenerateMedium(const std::string& m) : std::runtime_error(m) {}
};
struct NearSingularTransport : std::runtime_error {
    explicit NearSingularTransport(const std::string& m) : std::runtime_error(m) {}
};
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& m) : std::runtime_error(m) {}
};
struct UndefinedCorrelation : std::runtime_error {
    explicit UndefinedCorrelation(const std::string& m) : std::runtime_error(m) {}
};

inline constexpr double kPi = 3.14159265358979323846;

// surface area of the unit sphere S^{d-1}
inline double sphere_area(int d) {
    if (d == 2) return 2.0 * kPi;
    if (d == 3) return 4.0 * kPi;
    throw InvalidInput("sphere_area: dimension must be 2 or 3");
}

// weight constant of the polar-angle reduction: integrating F(cos theta) over
// S^{d-1} equals this times int_0^pi F(cos t) sin^{d-2} t dt (it is the area
// of the equatorial sphere S^{d-2})
inline double polar_weight(int d) {
    if (d == 2) return 2.0;
    if (d == 3) return 2.0 * kPi;
    throw InvalidInput("polar_weight: dimension must be 2 or 3");
}

template <int D>
using Vec = std::array<double, D>;

template <int D>
inline double dot(const Vec<D>& a, const Vec<D>& b) {
    double s = 0.0;
    for (int i = 0; i < D; ++i) s += a[i] * b[i];
    return s;
}

template <int D>
inline double norm(const Vec<D>& a) { return std::sqrt(dot<D>(a, a)); }

template <int D>
inline Vec<D> add(const Vec<D>& a, const Vec<D>& b) {
    Vec<D> r;
    for (int i = 0; i < D; ++i) r[i] = a[i] + b[i];
    return r;
}

template <int D>
inline Vec<D> sub(const Vec<D>& a, const Vec<D>& b) {
    Vec<D> r;
    for (int i = 0; i < D; ++i) r[i] = a[i] - b[i];
    return r;
}

template <int D>
inline Vec<D> scale(const Vec<D>& a, double s) {
    Vec<D> r;
    for (int i = 0; i < D; ++i) r[i] = a[i] * s;
    return r;
}

template <int D>
inline Vec<D> normalized(const Vec<D>& a) {
    double n = norm<D>(a);
    if (!(n > 0.0)) throw InvalidInput("normalized: zero vector");
    return scale<D>(a, 1.0 / n);
}

// directions are required unit to 1e-12 at module boundaries
template <int D>
inline void check_unit(const Vec<D>& a, const char* who) {
    if (std::abs(norm<D>(a) - 1.0) > 1e-12)
        throw InvalidInput(std::string(who) + ": direction not unit length");
}

}  // namespace specorr

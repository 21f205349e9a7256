#pragma once

#include <vector>

#include "specorr/core.hpp"
#include "specorr/fft.hpp"

namespace specorr {

/*
 * Discrete Wigner distribution of a field pair on a periodic grid,
 *
 *   W[u,v](x,k) = (2pi)^-d Int e^{ik.y} u(x - eps y/2) conj(v(x + eps y/2)) dy,
 *
 * evaluated with the offset y stepping by 2 dx / eps so the two arguments
 * move on grid points.  Frequencies come out in natural DFT order,
 * k_l = 2 pi l / (n dy); summing W over k against dk recovers u conj(v)
 * at every sample exactly, which is the identity the tests pin down.
 */
struct WignerField1D {
    int n = 0;
    double dx = 0.0;
    double eps = 1.0;
    std::vector<double> k;  // frequency per column, natural DFT order
    std::vector<cplx> w;    // w[i*n + l] = W(x_i, k_l)
};

struct WignerField2D {
    int n0 = 0, n1 = 0;
    double dx = 0.0;
    double eps = 1.0;
    std::vector<double> k0, k1;
    std::vector<cplx> w;  // w[((i0*n1 + i1)*n0 + l0)*n1 + l1]
};

inline WignerField1D wigner_transform(const std::vector<cplx>& u, const std::vector<cplx>& v,
                                      double dx, double eps = 1.0) {
    if (u.size() != v.size()) throw InvalidInput("wigner_transform: grids differ in size");
    if (u.empty() || (u.size() & (u.size() - 1)) != 0)
        throw InvalidInput("wigner_transform: grid size must be a power of two");
    if (!(dx > 0.0) || !(eps > 0.0))
        throw InvalidInput("wigner_transform: dx and eps must be positive");

    const int n = static_cast<int>(u.size());
    const double dy = 2.0 * dx / eps;

    WignerField1D out;
    out.n = n;
    out.dx = dx;
    out.eps = eps;
    out.k.resize(n);
    for (int l = 0; l < n; ++l) out.k[l] = 2.0 * kPi * l / (n * dy);
    out.w.resize(static_cast<std::size_t>(n) * n);

    std::vector<cplx> s(n);
    const double norm = dy / (2.0 * kPi);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            s[j] = u[(i - j + n) % n] * std::conj(v[(i + j) % n]);
        fft_pow2(s, +1);  // unnormalized inverse transform: sum_j s_j e^{+2pi i jl/n}
        for (int l = 0; l < n; ++l) out.w[static_cast<std::size_t>(i) * n + l] = norm * s[l];
    }
    return out;
}

// sum_l W(x_i, k_l) dk for each sample point
inline std::vector<cplx> wigner_marginal(const WignerField1D& f) {
    std::vector<cplx> m(f.n, cplx{0.0, 0.0});
    const double dy = 2.0 * f.dx / f.eps;
    const double dk = 2.0 * kPi / (f.n * dy);
    for (int i = 0; i < f.n; ++i) {
        cplx acc{0.0, 0.0};
        for (int l = 0; l < f.n; ++l) acc += f.w[static_cast<std::size_t>(i) * f.n + l];
        m[i] = acc * dk;
    }
    return m;
}

inline WignerField2D wigner_transform_2d(const std::vector<cplx>& u, const std::vector<cplx>& v,
                                         int n0, int n1, double dx, double eps = 1.0) {
    if (u.size() != v.size()) throw InvalidInput("wigner_transform_2d: grids differ in size");
    if (n0 <= 0 || n1 <= 0 || u.size() != static_cast<std::size_t>(n0) * n1)
        throw InvalidInput("wigner_transform_2d: grid shape does not match sample count");
    if ((n0 & (n0 - 1)) != 0 || (n1 & (n1 - 1)) != 0)
        throw InvalidInput("wigner_transform_2d: grid sides must be powers of two");
    if (!(dx > 0.0) || !(eps > 0.0))
        throw InvalidInput("wigner_transform_2d: dx and eps must be positive");

    const double dy = 2.0 * dx / eps;

    WignerField2D out;
    out.n0 = n0;
    out.n1 = n1;
    out.dx = dx;
    out.eps = eps;
    out.k0.resize(n0);
    out.k1.resize(n1);
    for (int l = 0; l < n0; ++l) out.k0[l] = 2.0 * kPi * l / (n0 * dy);
    for (int l = 0; l < n1; ++l) out.k1[l] = 2.0 * kPi * l / (n1 * dy);
    out.w.assign(static_cast<std::size_t>(n0) * n1 * n0 * n1, cplx{0.0, 0.0});

    auto at = [n1](int i0, int i1) { return static_cast<std::size_t>(i0) * n1 + i1; };
    const double norm = (dy / (2.0 * kPi)) * (dy / (2.0 * kPi));

    std::vector<cplx> s(static_cast<std::size_t>(n0) * n1);
    std::vector<cplx> line;
    for (int i0 = 0; i0 < n0; ++i0) {
        for (int i1 = 0; i1 < n1; ++i1) {
            for (int j0 = 0; j0 < n0; ++j0)
                for (int j1 = 0; j1 < n1; ++j1)
                    s[at(j0, j1)] = u[at((i0 - j0 + n0) % n0, (i1 - j1 + n1) % n1)] *
                                    std::conj(v[at((i0 + j0) % n0, (i1 + j1) % n1)]);
            // inverse 2D transform, one axis at a time
            line.resize(n1);
            for (int j0 = 0; j0 < n0; ++j0) {
                for (int j1 = 0; j1 < n1; ++j1) line[j1] = s[at(j0, j1)];
                fft_pow2(line, +1);
                for (int j1 = 0; j1 < n1; ++j1) s[at(j0, j1)] = line[j1];
            }
            line.resize(n0);
            for (int j1 = 0; j1 < n1; ++j1) {
                for (int j0 = 0; j0 < n0; ++j0) line[j0] = s[at(j0, j1)];
                fft_pow2(line, +1);
                for (int j0 = 0; j0 < n0; ++j0) s[at(j0, j1)] = line[j0];
            }
            std::size_t base = (static_cast<std::size_t>(i0) * n1 + i1) *
                               (static_cast<std::size_t>(n0) * n1);
            for (std::size_t q = 0; q < s.size(); ++q) out.w[base + q] = norm * s[q];
        }
    }
    return out;
}

inline std::vector<cplx> wigner_marginal_2d(const WignerField2D& f) {
    const double dy = 2.0 * f.dx / f.eps;
    const double dk0 = 2.0 * kPi / (f.n0 * dy);
    const double dk1 = 2.0 * kPi / (f.n1 * dy);
    const std::size_t block = static_cast<std::size_t>(f.n0) * f.n1;
    std::vector<cplx> m(block, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < block; ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t q = 0; q < block; ++q) acc += f.w[i * block + q];
        m[i] = acc * dk0 * dk1;
    }
    return m;
}

}  // namespace specorr

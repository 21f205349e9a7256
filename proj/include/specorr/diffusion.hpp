#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "specorr/core.hpp"

namespace specorr {

// uniform node grid over an axis-aligned box; spacing must divide every side
template <int D>
class Grid {
  public:
    Grid(const Vec<D>& lo, const Vec<D>& hi, double h) : lo_(lo), hi_(hi), h_(h) {
        if (!(h > 0.0)) throw InvalidInput("Grid: spacing must be positive");
        std::size_t total = 1;
        for (int a = 0; a < D; ++a) {
            double len = hi[a] - lo[a];
            if (!(len > 0.0)) throw InvalidInput("Grid: box extents must be positive");
            double m = len / h;
            double m_round = std::round(m);
            if (std::abs(m - m_round) > 1e-9 * std::max(1.0, m))
                throw InvalidInput("Grid: spacing does not divide the domain side length");
            if (m_round < 2.0) throw InvalidInput("Grid: need at least two cells per axis");
            n_[a] = static_cast<int>(m_round) + 1;
            total *= static_cast<std::size_t>(n_[a]);
        }
        size_ = total;
    }

    double spacing() const { return h_; }
    int nodes(int axis) const { return n_[axis]; }
    std::size_t size() const { return size_; }
    const Vec<D>& lo() const { return lo_; }
    const Vec<D>& hi() const { return hi_; }

    std::size_t index(const std::array<int, D>& m) const {
        std::size_t idx = 0;
        for (int a = 0; a < D; ++a) idx = idx * static_cast<std::size_t>(n_[a]) + m[a];
        return idx;
    }

    std::array<int, D> unpack(std::size_t idx) const {
        std::array<int, D> m{};
        for (int a = D - 1; a >= 0; --a) {
            m[a] = static_cast<int>(idx % static_cast<std::size_t>(n_[a]));
            idx /= static_cast<std::size_t>(n_[a]);
        }
        return m;
    }

    Vec<D> position(const std::array<int, D>& m) const {
        Vec<D> x{};
        for (int a = 0; a < D; ++a) x[a] = lo_[a] + h_ * m[a];
        return x;
    }

  private:
    Vec<D> lo_, hi_;
    double h_;
    std::array<int, D> n_{};
    std::size_t size_ = 0;
};

enum class NodeKind : std::uint8_t { Free = 0, Fixed = 1, Excluded = 2 };

/*
 * One stationary problem −kappa ΔW − i a(x) W = 0 on the grid, Dirichlet data
 * on the box faces, value pinned to 0 on excluded interior nodes.  Faces may
 * instead be marked reflecting (mirror ghost), which is a convenience for
 * quasi-1D verification setups.
 */
template <int D>
struct DiffusionProblem {
    Grid<D> grid;
    double diffusion_scalar = 1.0;
    std::array<std::function<double(const Vec<D>&)>, 2 * D> face_values{};  // empty slot = 0
    std::array<bool, 2 * D> reflecting{};
    std::vector<std::function<bool(const Vec<D>&)>> excluded;
    std::function<double(const Vec<D>&)> absorption_divergence;  // a(x); empty = none
    std::vector<int> measured_faces;  // used only for the disconnection diagnostic
    double solver_tol = 1e-10;        // relative-residual acceptance gate

    explicit DiffusionProblem(const Grid<D>& g) : grid(g) {}

    double face_value(int f, const Vec<D>& x) const {
        if (!face_values[f]) return 0.0;
        double v = face_values[f](x);
        if (v < 0.0) throw InvalidInput("DiffusionProblem: boundary data must be non-negative");
        return v;
    }
};

template <int D>
struct FieldGrid {
    Grid<D> grid;
    std::vector<cplx> values;          // every node, Dirichlet/excluded included
    std::vector<NodeKind> kind;        // per node
    double residual_norm = 0.0;        // relative linear-solve residual
    bool source_disconnected = false;  // excluded nodes cut source off from measured faces

    explicit FieldGrid(const Grid<D>& g)
        : grid(g), values(g.size(), cplx{0.0, 0.0}), kind(g.size(), NodeKind::Free) {}

    cplx value_at(const std::array<int, D>& m) const { return values[grid.index(m)]; }
};

namespace detail {

// faces a node lies on, ordered by axis
template <int D>
inline int node_faces(const Grid<D>& g, const std::array<int, D>& m, std::array<int, 3>& out) {
    int n = 0;
    for (int a = 0; a < D; ++a) {
        if (m[a] == 0) out[n++] = 2 * a;
        else if (m[a] == g.nodes(a) - 1) out[n++] = 2 * a + 1;
    }
    return n;
}

template <int D>
inline void classify_nodes(const DiffusionProblem<D>& prob, FieldGrid<D>& field) {
    const Grid<D>& g = prob.grid;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        auto m = g.unpack(idx);
        std::array<int, 3> faces{};
        int nf = node_faces<D>(g, m, faces);
        if (nf > 0) {
            // Dirichlet wins over reflecting at edges; data conflicts at
            // corners resolve to the larger value
            bool any_fixed = false;
            double v = 0.0;
            Vec<D> x = g.position(m);
            for (int i = 0; i < nf; ++i) {
                if (prob.reflecting[faces[i]]) continue;
                any_fixed = true;
                v = std::max(v, prob.face_value(faces[i], x));
            }
            if (any_fixed) {
                field.kind[idx] = NodeKind::Fixed;
                field.values[idx] = cplx{v, 0.0};
                continue;
            }
            field.kind[idx] = NodeKind::Free;  // lies only on reflecting faces
            continue;
        }
        bool excl = false;
        Vec<D> x = g.position(m);
        for (const auto& region : prob.excluded) {
            if (region(x)) { excl = true; break; }
        }
        field.kind[idx] = excl ? NodeKind::Excluded : NodeKind::Free;
        if (excl) field.values[idx] = cplx{0.0, 0.0};
    }
}

template <int D>
inline void flag_disconnection(const DiffusionProblem<D>& prob, FieldGrid<D>& field) {
    field.source_disconnected = false;
    if (prob.measured_faces.empty()) return;
    const Grid<D>& g = prob.grid;

    bool have_source = false;
    for (std::size_t idx = 0; idx < g.size() && !have_source; ++idx)
        if (field.kind[idx] == NodeKind::Fixed && field.values[idx].real() > 0.0)
            have_source = true;
    if (!have_source) return;

    auto on_measured = [&](const std::array<int, D>& m) {
        std::array<int, 3> faces{};
        int nf = node_faces<D>(g, m, faces);
        for (int i = 0; i < nf; ++i)
            for (int mf : prob.measured_faces)
                if (faces[i] == mf) return true;
        return false;
    };

    std::vector<std::uint8_t> visited(g.size(), 0);
    std::queue<std::size_t> frontier;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (field.kind[idx] != NodeKind::Free) continue;
        auto m = g.unpack(idx);
        for (int a = 0; a < D && !visited[idx]; ++a) {
            for (int s = -1; s <= 1; s += 2) {
                int j = m[a] + s;
                if (j < 0 || j >= g.nodes(a)) continue;
                auto mn = m;
                mn[a] = j;
                std::size_t nidx = g.index(mn);
                if (field.kind[nidx] == NodeKind::Fixed && field.values[nidx].real() > 0.0) {
                    visited[idx] = 1;
                    frontier.push(idx);
                    break;
                }
            }
        }
    }

    bool reached_measured = false;
    while (!frontier.empty() && !reached_measured) {
        std::size_t idx = frontier.front();
        frontier.pop();
        auto m = g.unpack(idx);
        if (on_measured(m)) {  // free node on a reflecting measured face
            reached_measured = true;
            break;
        }
        for (int a = 0; a < D; ++a) {
            for (int s = -1; s <= 1; s += 2) {
                int j = m[a] + s;
                if (j < 0 || j >= g.nodes(a)) continue;
                auto mn = m;
                mn[a] = j;
                std::size_t nidx = g.index(mn);
                if (field.kind[nidx] == NodeKind::Fixed && on_measured(mn)) {
                    reached_measured = true;
                    break;
                }
                if (field.kind[nidx] == NodeKind::Free && !visited[nidx]) {
                    visited[nidx] = 1;
                    frontier.push(nidx);
                }
            }
            if (reached_measured) break;
        }
    }
    field.source_disconnected = !reached_measured;
}

}  // namespace detail

/*
 * 5/7-point assembly and sparse solve.  Problems without an absorption term
 * assemble in real arithmetic (and, absent reflecting faces, as an SPD
 * system), so the trivially-degenerate complex cases reuse the identical
 * factorization path and match the real solutions bit for bit.
 */
template <int D>
inline FieldGrid<D> solve_diffusion(const DiffusionProblem<D>& prob) {
    const Grid<D>& g = prob.grid;
    if (!(prob.diffusion_scalar > 0.0))
        throw InvalidInput("solve_diffusion: diffusion scalar must be positive");

    if (!(prob.solver_tol > 0.0))
        throw InvalidInput("solve_diffusion: solver tolerance must be positive");
    // iterative fallback targets a stricter tolerance than the acceptance gate
    const double krylov_tol = std::min(1e-12, 0.01 * prob.solver_tol);

    FieldGrid<D> field(g);
    detail::classify_nodes<D>(prob, field);

    std::vector<std::ptrdiff_t> unknown_of(g.size(), -1);
    std::vector<std::size_t> node_of;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (field.kind[idx] == NodeKind::Free) {
            unknown_of[idx] = static_cast<std::ptrdiff_t>(node_of.size());
            node_of.push_back(idx);
        }
    }
    const std::size_t n_free = node_of.size();
    if (n_free == 0) {
        detail::flag_disconnection<D>(prob, field);
        return field;
    }

    const double h = g.spacing();
    const double w = prob.diffusion_scalar / (h * h);

    std::vector<double> alpha;  // absorption samples on the unknowns
    bool any_absorption = false;
    if (prob.absorption_divergence) {
        alpha.resize(n_free);
        for (std::size_t r = 0; r < n_free; ++r) {
            alpha[r] = prob.absorption_divergence(g.position(g.unpack(node_of[r])));
            if (alpha[r] != 0.0) any_absorption = true;
        }
    }

    bool any_reflecting = false;
    for (int f = 0; f < 2 * D; ++f) any_reflecting |= prob.reflecting[f];

    using TripletC = Eigen::Triplet<cplx>;
    using TripletR = Eigen::Triplet<double>;
    std::vector<TripletC> trips_c;
    std::vector<TripletR> trips_r;
    const bool complex_path = any_absorption;
    if (complex_path) trips_c.reserve(n_free * (2 * D + 1));
    else trips_r.reserve(n_free * (2 * D + 1));

    Eigen::VectorXcd rhs_c;
    Eigen::VectorXd rhs_r;
    if (complex_path) rhs_c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_free));
    else rhs_r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_free));

    for (std::size_t r = 0; r < n_free; ++r) {
        auto m = g.unpack(node_of[r]);
        double diag = 2.0 * D * w;
        double rhs_val = 0.0;
        for (int a = 0; a < D; ++a) {
            for (int s = -1; s <= 1; s += 2) {
                auto mn = m;
                mn[a] = m[a] + s;
                if (mn[a] < 0 || mn[a] >= g.nodes(a)) {
                    // mirror ghost across a reflecting face: ghost value
                    // equals the inside neighbor, doubling that link
                    mn[a] = m[a] - s;
                }
                std::size_t nidx = g.index(mn);
                if (field.kind[nidx] == NodeKind::Free) {
                    std::ptrdiff_t c = unknown_of[nidx];
                    if (complex_path)
                        trips_c.emplace_back(static_cast<int>(r), static_cast<int>(c),
                                             cplx{-w, 0.0});
                    else
                        trips_r.emplace_back(static_cast<int>(r), static_cast<int>(c), -w);
                } else {
                    rhs_val += w * field.values[nidx].real();  // excluded nodes contribute 0
                }
            }
        }
        if (complex_path) {
            trips_c.emplace_back(static_cast<int>(r), static_cast<int>(r),
                                 cplx{diag, -alpha[r]});
            rhs_c[static_cast<Eigen::Index>(r)] = cplx{rhs_val, 0.0};
        } else {
            trips_r.emplace_back(static_cast<int>(r), static_cast<int>(r), diag);
            rhs_r[static_cast<Eigen::Index>(r)] = rhs_val;
        }
    }

    constexpr std::size_t kDirectLimit = 1'000'000;

    if (complex_path) {
        Eigen::SparseMatrix<cplx> A(static_cast<Eigen::Index>(n_free),
                                    static_cast<Eigen::Index>(n_free));
        A.setFromTriplets(trips_c.begin(), trips_c.end());
        A.makeCompressed();
        double bnorm = rhs_c.norm();
        Eigen::VectorXcd x;
        if (bnorm == 0.0) {
            x = Eigen::VectorXcd::Zero(A.rows());
        } else if (n_free <= kDirectLimit) {
            Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu(A);
            if (lu.info() != Eigen::Success)
                throw NumericalFailure("solve_diffusion: sparse factorization failed");
            x = lu.solve(rhs_c);
        } else {
            Eigen::BiCGSTAB<Eigen::SparseMatrix<cplx>, Eigen::IncompleteLUT<cplx>> krylov;
            krylov.setTolerance(krylov_tol);
            krylov.compute(A);
            x = krylov.solve(rhs_c);
            if (krylov.info() != Eigen::Success)
                throw NumericalFailure("solve_diffusion: iterative solve stalled at residual " +
                                       std::to_string(krylov.error()));
        }
        field.residual_norm = bnorm == 0.0 ? 0.0 : (A * x - rhs_c).norm() / bnorm;
        for (std::size_t r = 0; r < n_free; ++r)
            field.values[node_of[r]] = x[static_cast<Eigen::Index>(r)];
    } else {
        Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(n_free),
                                      static_cast<Eigen::Index>(n_free));
        A.setFromTriplets(trips_r.begin(), trips_r.end());
        A.makeCompressed();
        double bnorm = rhs_r.norm();
        Eigen::VectorXd x;
        if (bnorm == 0.0) {
            x = Eigen::VectorXd::Zero(A.rows());
        } else if (!any_reflecting && n_free <= kDirectLimit) {
            // pure Dirichlet 5/7-point Laplacian is SPD
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
            if (ldlt.info() != Eigen::Success)
                throw NumericalFailure("solve_diffusion: Cholesky factorization failed");
            x = ldlt.solve(rhs_r);
        } else if (n_free <= kDirectLimit) {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
            if (lu.info() != Eigen::Success)
                throw NumericalFailure("solve_diffusion: sparse factorization failed");
            x = lu.solve(rhs_r);
        } else {
            Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> krylov;
            krylov.setTolerance(krylov_tol);
            krylov.compute(A);
            x = krylov.solve(rhs_r);
            if (krylov.info() != Eigen::Success)
                throw NumericalFailure("solve_diffusion: iterative solve stalled at residual " +
                                       std::to_string(krylov.error()));
        }
        field.residual_norm = bnorm == 0.0 ? 0.0 : (A * x - rhs_r).norm() / bnorm;
        for (std::size_t r = 0; r < n_free; ++r)
            field.values[node_of[r]] = cplx{x[static_cast<Eigen::Index>(r)], 0.0};
    }

    if (field.residual_norm > prob.solver_tol)
        throw NumericalFailure("solve_diffusion: relative residual " +
                               std::to_string(field.residual_norm) + " exceeds " +
                               std::to_string(prob.solver_tol));

    detail::flag_disconnection<D>(prob, field);
    return field;
}

/*
 * Outward normal flux through one box face, diffusion_scalar * integral of
 * nu . grad W, with a second-order one-sided normal derivative and the
 * trapezoid rule along the face.  The field must vanish on the face, so the
 * face may not carry source data.
 */
template <int D>
inline cplx boundary_flux(const FieldGrid<D>& field, const DiffusionProblem<D>& prob, int face) {
    const Grid<D>& g = field.grid;
    if (face < 0 || face >= 2 * D) throw InvalidInput("boundary_flux: no such face");
    if (prob.reflecting[face])
        throw InvalidInput("boundary_flux: face is reflecting, flux undefined");
    const int axis = face / 2;
    const int side = face % 2;
    if (g.nodes(axis) < 3)
        throw InvalidInput("boundary_flux: need at least three nodes along the face normal");

    const double h = g.spacing();
    const int i0 = side ? g.nodes(axis) - 1 : 0;
    const int inward = side ? -1 : 1;

    cplx total{0.0, 0.0};
    std::array<int, D> m{};
    m[axis] = i0;

    // walk the (D-1)-dimensional face lattice
    std::array<int, D> t{};  // tangential multi-index
    std::array<int, D> tdim{};
    int nt = 0;
    for (int a = 0; a < D; ++a)
        if (a != axis) tdim[nt++] = a;

    auto advance = [&]() {
        for (int i = nt - 1; i >= 0; --i) {
            if (++t[i] < g.nodes(tdim[i])) return true;
            t[i] = 0;
        }
        return false;
    };

    do {
        double weight = 1.0;
        for (int i = 0; i < nt; ++i) {
            m[tdim[i]] = t[i];
            bool edge = (t[i] == 0 || t[i] == g.nodes(tdim[i]) - 1);
            weight *= h * (edge ? 0.5 : 1.0);
        }
        Vec<D> x = g.position(m);
        if (prob.face_value(face, x) != 0.0)
            throw InvalidInput("boundary_flux: face carries source data");

        auto m1 = m, m2 = m;
        m1[axis] = i0 + inward;
        m2[axis] = i0 + 2 * inward;
        cplx deriv =
            (3.0 * field.values[g.index(m)] - 4.0 * field.values[g.index(m1)] +
             field.values[g.index(m2)]) /
            (2.0 * h);
        total += weight * deriv;
    } while (advance());

    return prob.diffusion_scalar * total;
}

/*
 * Exact-telescoping companion of boundary_flux: sums the discrete link
 * differences between free nodes and the constrained set, so the grand total
 * over all faces plus the excluded rim vanishes identically (up to the
 * linear-solve residual).  Used for conservation checks, not for C12.
 */
template <int D>
inline cplx discrete_face_flux(const FieldGrid<D>& field, const DiffusionProblem<D>& prob,
                               int face) {
    const Grid<D>& g = field.grid;
    if (face < 0 || face >= 2 * D) throw InvalidInput("discrete_face_flux: no such face");
    const int axis = face / 2;
    const int side = face % 2;
    const int i0 = side ? g.nodes(axis) - 1 : 0;
    const int inward = side ? -1 : 1;
    const double scale = prob.diffusion_scalar * std::pow(g.spacing(), D - 2);

    cplx total{0.0, 0.0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        auto m = g.unpack(idx);
        if (m[axis] != i0) continue;
        if (field.kind[idx] != NodeKind::Fixed) continue;
        auto mi = m;
        mi[axis] = i0 + inward;
        bool interior_ok = true;
        for (int a = 0; a < D; ++a)
            if (mi[a] < 0 || mi[a] >= g.nodes(a)) interior_ok = false;
        if (!interior_ok) continue;
        std::size_t nidx = g.index(mi);
        if (field.kind[nidx] != NodeKind::Free) continue;
        total += field.values[idx] - field.values[nidx];
    }
    return scale * total;
}

template <int D>
inline cplx discrete_excluded_flux(const FieldGrid<D>& field, const DiffusionProblem<D>& prob) {
    const Grid<D>& g = field.grid;
    const double scale = prob.diffusion_scalar * std::pow(g.spacing(), D - 2);

    cplx total{0.0, 0.0};
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (field.kind[idx] != NodeKind::Excluded) continue;
        auto m = g.unpack(idx);
        for (int a = 0; a < D; ++a) {
            for (int s = -1; s <= 1; s += 2) {
                auto mn = m;
                mn[a] = m[a] + s;
                if (mn[a] < 0 || mn[a] >= g.nodes(a)) continue;
                std::size_t nidx = g.index(mn);
                if (field.kind[nidx] == NodeKind::Free)
                    total += field.values[idx] - field.values[nidx];
            }
        }
    }
    return scale * total;
}

}  // namespace specorr

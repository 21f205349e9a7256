#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "specorr/core.hpp"
#include "specorr/quadrature.hpp"

namespace specorr {

/*
 * Chandrasekhar H-function for isotropic scattering with single-scattering
 * albedo omega, sampled on Gauss-Legendre nodes over [0,1].  Off-node values
 * come from the defining equation in inverse form,
 *
 *   1/H(mu) = 1 - (omega/2) mu Int_0^1 H(t)/(mu+t) dt,
 *
 * which is exact at the fixed point and yields H(0) = 1 identically.
 */
class HFunction {
  public:
    HFunction(std::vector<double> nodes, std::vector<double> weights, std::vector<double> values,
              double albedo)
        : nodes_(std::move(nodes)),
          weights_(std::move(weights)),
          values_(std::move(values)),
          albedo_(albedo) {}

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& values() const { return values_; }
    double albedo() const { return albedo_; }

    double value(double mu) const {
        if (mu < 0.0 || mu > 1.0) throw InvalidInput("HFunction: mu outside [0,1]");
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            acc += weights_[j] * values_[j] / (mu + nodes_[j]);
        return 1.0 / (1.0 - 0.5 * albedo_ * mu * acc);
    }

    // Int_0^1 H(mu) mu^k dmu on the sample nodes
    double moment(int k) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < nodes_.size(); ++j)
            acc += weights_[j] * values_[j] * std::pow(nodes_[j], k);
        return acc;
    }

  private:
    std::vector<double> nodes_, weights_, values_;
    double albedo_;
};

/*
 * Stabilized fixed-point iteration.  The bare inverse-form map oscillates in
 * a 2-cycle as omega -> 1, so every sweep is followed by a rescale to the
 * exact zeroth moment (2/omega)(1 - sqrt(1-omega)); the true H is a fixed
 * point of the combined map and the iteration then contracts for all
 * omega in (0,1].
 */
inline HFunction compute_h_function(double albedo, int n_nodes = 64, double tol = 1e-13) {
    if (!(albedo > 0.0) || albedo > 1.0)
        throw InvalidInput("compute_h_function: albedo must lie in (0,1]");
    if (n_nodes < 2) throw InvalidInput("compute_h_function: need at least two nodes");
    if (!(tol > 0.0)) throw InvalidInput("compute_h_function: tolerance must be positive");

    QuadRule rule = gauss_legendre(n_nodes, 0.0, 1.0);
    const auto& mu = rule.x;
    const auto& w = rule.w;
    std::vector<double> h(n_nodes, 1.0), h_next(n_nodes);

    const double m0_target = (2.0 / albedo) * (1.0 - std::sqrt(std::max(0.0, 1.0 - albedo)));
    const int max_sweeps = 500;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int i = 0; i < n_nodes; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n_nodes; ++j) acc += w[j] * h[j] / (mu[i] + mu[j]);
            h_next[i] = 1.0 / (1.0 - 0.5 * albedo * mu[i] * acc);
        }
        double m0 = 0.0;
        for (int j = 0; j < n_nodes; ++j) m0 += w[j] * h_next[j];
        double scale = m0_target / m0;
        double delta = 0.0;
        for (int j = 0; j < n_nodes; ++j) {
            h_next[j] *= scale;
            delta = std::max(delta, std::abs(h_next[j] - h[j]));
        }
        h.swap(h_next);
        if (delta <= tol) return HFunction(mu, w, h, albedo);
    }
    throw NumericalFailure("compute_h_function: no convergence after " +
                           std::to_string(max_sweeps) + " sweeps");
}

enum class BoundaryMapMode { IsotropicIdentity, Chandrasekhar };

/*
 * Angular-to-scalar reduction of an inbound boundary source: the Dirichlet
 * datum of the grid solver is q = Int_0^1 p(mu) H(mu) (mu/2) dmu.  The
 * identity mode bypasses the weighting and is the default for sources
 * already given as plain intensities.
 */
inline double map_boundary_source(const std::function<double(double)>& p_of_mu,
                                  const HFunction& h) {
    double q = 0.0;
    const auto& mu = h.nodes();
    const auto& w = h.weights();
    for (std::size_t j = 0; j < mu.size(); ++j) {
        double p = p_of_mu(mu[j]);
        if (p < 0.0) throw InvalidInput("map_boundary_source: source must be non-negative");
        q += w[j] * p * h.values()[j] * 0.5 * mu[j];
    }
    return q;
}

inline double map_constant_source(double p, const HFunction* h, BoundaryMapMode mode) {
    if (p < 0.0) throw InvalidInput("map_constant_source: source must be non-negative");
    if (mode == BoundaryMapMode::IsotropicIdentity) return p;
    if (!h) throw InvalidInput("map_constant_source: Chandrasekhar mode needs an H-function");
    return p * 0.5 * h->moment(1);
}

}  // namespace specorr

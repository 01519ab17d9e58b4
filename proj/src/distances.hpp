#pragma once

#include "state_space.hpp"
#include "generator.hpp"

#include <functional>
#include <span>

namespace steinlab {

// Total variation distance between two distributions on the same space.
double tv(const ProbVec& p, const ProbVec& q);

struct TransportResult {
    double cost = 0.0;
    double dual_gap = 0.0;  // primal minus dual objective at termination
    std::size_t augmentations = 0;
};

// Exact minimum-cost transport between nonnegative mass vectors of equal
// total, by successive shortest augmenting paths with node potentials.
// cost(i, j) is the unit cost from supply index i to demand index j; costs are
// rounded to 1e-12 internally so path ties resolve deterministically.
TransportResult min_cost_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                   const std::function<double(std::size_t, std::size_t)>& cost);

// Average-matching distance between two configurations (counts over the
// carrier's points): the cheapest point-by-point matching under the ground
// metric divided by the common total, 1 when the totals differ, 0 when both
// are empty.
double d1(std::span<const int> xi, std::span<const int> eta, const Carrier& carrier);

struct LipschitzReport {
    bool ok = true;
    double worst_margin = -1.0;       // max over pairs of |h(xi)-h(eta)| - d1(xi,eta)
    std::size_t worst_xi = 0, worst_eta = 0;
    std::size_t pairs_checked = 0;
};

// Exhaustive check that |h(xi) - h(eta)| <= d1(xi, eta) on a configuration
// space.  Pairs where h agrees cannot violate and are skipped.
LipschitzReport check_d1_lipschitz(const Eigen::VectorXd& h, const StateSpace& space);

inline constexpr std::size_t kExactD2MaxStates = 3000;

// Exact Wasserstein distance between two distributions on one configuration
// space, with ground distance d1.  Feasible only for small spaces: the guard
// protects against the dense cost matrix.
TransportResult d2_exact(const ProbVec& p, const ProbVec& q);

// Lower bound |E_P h - E_Q h| for an h that is certified 1-Lipschitz under d1
// by the exhaustive check; fails if the certificate does not hold.
double d2_lower_bound(const ProbVec& p, const ProbVec& q, const Eigen::VectorXd& h);

}  // namespace steinlab

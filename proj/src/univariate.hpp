#pragma once

#include "generator.hpp"
#include "solvers.hpp"

#include <vector>

namespace steinlab::uni {

// Immigration-death process on {0..n_max} with immigration rate lambda and
// unit per-capita death rate, plus a one-state perturbation: at state k the
// birth rate is lambda+1 and the total death rate k+1.
struct Problem {
    double lambda = 0.0;
    int k = 0;
    int n_max = 0;
    SpacePtr space;
};

// k <= 0 or n_max <= 0 select the defaults k = max(1, floor(lambda)) and
// n_max = ceil(lambda + 12 sqrt(lambda) + 20).
Problem make_problem(double lambda, int k = 0, int n_max = 0,
                     std::size_t max_states = kDefaultMaxStates);

struct Pmf {
    ProbVec p;
    double tail_mass = 0.0;  // Poisson mass beyond the truncation, before renormalizing
};

Pmf poisson_pmf(double lambda, const SpacePtr& space);

Generator base_generator(const Problem& pr);
Generator perturbed_generator(const Problem& pr);

// Stationary distribution of the perturbed chain from the birth-death
// detailed-balance product, in log space.  Subtraction-free alternative to
// the generic solver.
ProbVec perturbed_stationary_closed_form(const Problem& pr);

// Solution of  lambda g(j+1) - j g(j) = h(j) - E h  on the truncated support,
// with the centering mean taken against pmf and the convention g(0) = g(1).
// The recursion is evaluated from the left of the mode and from the right
// beyond it, which keeps every term a ratio of same-sign partial sums.
struct RecursionSolution {
    Eigen::VectorXd g;
    double residual = 0.0;  // max over j of the equation defect
};

RecursionSolution stein_solution(double lambda, const Eigen::VectorXd& h, const Pmf& pmf);

// Weights c with  g_h(k+1) - g_h(k) = sum_j c(j) h(j)  for every h; they sum
// to zero, so the sup of |g_h(k+1) - g_h(k)| over indicator h is half their
// l1 norm.  Requires 1 <= k <= n_max - 1.
Eigen::VectorXd delta_weights(double lambda, int k, const Pmf& pmf);
double sup_delta_g(double lambda, int k, const Pmf& pmf);

struct IdentityReport {
    double lambda = 0.0;
    int k = 0;
    int n_max = 0;
    double p_k = 0.0;      // stationary mass of the perturbed chain at k
    double d_tv = 0.0;     // distance between perturbed chain and truncated Poisson
    double sup = 0.0;      // sup over indicator h of |g_h(k+1) - g_h(k)|
    double rel_err = 0.0;  // |d_tv - p_k * sup| / (p_k * sup)
    double leak = 0.0;     // stationary flow into the truncated boundary
    double tail = 0.0;     // Poisson mass beyond the truncation
};

// The exact identity d_tv = p_k * sup.  Both sides come out of the
// stationary-difference solve, so the check stays meaningful even when the
// perturbation site carries exponentially small mass.
IdentityReport check_distance_identity(const Problem& pr);

struct NormReport {
    double sup_g = 0.0;   // max over j, h = indicator{j} of |g_h|
    double bound_g = 0.0; // 1 and sqrt(2/(e lambda)), whichever is smaller
    double sup_dg = 0.0;  // max over j, h of |g_h(.+1) - g_h(.)|
    double bound_dg = 0.0;  // (1 - exp(-lambda))/lambda
    bool ok = false;
};

NormReport check_norm_bounds(double lambda, const SpacePtr& space);

// Per k in 1..n_max-1: the distance-to-mass ratio of the k-perturbed chain
// next to the recursion sup of the solution difference.  The max over k of
// either column is the smoothness constant of the whole solution family.
struct RatioProfile {
    std::vector<int> k;
    std::vector<double> ratio;  // d_tv / p_k
    std::vector<double> sup;    // sup over indicator h of |g_h(k+1) - g_h(k)|
};

RatioProfile distance_ratio_profile(double lambda, const SpacePtr& space);

struct RateRow {
    double lambda = 0.0;
    int k = 0;
    int n_max = 0;
    double p_k = 0.0;
    double d_tv = 0.0;
    double sup_dg = 0.0;
    double rel_err = 0.0;
    double leak = 0.0;
    double tail = 0.0;
    double dtv_l32 = 0.0;   // d_tv * lambda^{3/2}
    double p_sqrtl = 0.0;   // p_k * sqrt(lambda)
    double sup_l = 0.0;     // sup * lambda
};

RateRow rate_row(const Problem& pr);

}  // namespace steinlab::uni

#pragma once

#include "distances.hpp"
#include "generator.hpp"
#include "solvers.hpp"

namespace steinlab::pp {

// Immigration-death process on finite configurations over a carrier with two
// distinguished points a and b of intensity 1/|lambda| each.  The
// perturbation: from the one-point configuration at a, the birth rate at b
// and the death rate at a each gain 1/2, mirrored at b.
struct Problem {
    Carrier carrier;
    int n_total_max = 0;
    int n_ab_max = 0;
    SpacePtr space;
    std::size_t idx_empty = 0, idx_a = 0, idx_b = 0, idx_ab = 0;
};

// n_total_max <= 0 selects ceil(lambda + 12 sqrt(lambda) + 20).
Problem make_problem(double lambda_total, int s_size = 1, int n_total_max = 0, int n_ab_max = 6,
                     std::size_t max_states = kDefaultMaxStates);
// Same, for a prebuilt carrier (custom ground metric inside the ordinary block).
Problem make_problem(const Carrier& carrier, int n_total_max = 0, int n_ab_max = 6,
                     std::size_t max_states = kDefaultMaxStates);

struct Pmf {
    ProbVec p;
    double tail_mass = 0.0;
};

// Truncated product Poisson over per-point counts; exactly stationary for the
// truncated unperturbed process.
Pmf product_pmf(const Problem& pr);

Generator base_generator(const Problem& pr);
Generator perturbed_generator(const Problem& pr);

// Slowly decaying test function: 1/|xi| on {xi_a = m_a, xi_b = m_b, xi != 0},
// zero elsewhere.  1-Lipschitz under d1 for m_a, m_b in {0, 1}.
Eigen::VectorXd test_function(const Problem& pr, int m_a, int m_b);

// g(delta_a + delta_b) - g(delta_a) - g(delta_b) + g(empty).
double delta_ab(const Problem& pr, const Eigen::VectorXd& g);

// Uniform smoothness bound: 1 and (5/(2 lambda))(1 + 2 log+(2 lambda/5)),
// whichever is smaller.
double uniform_bound(double lambda_total);

LipschitzReport check_h2(const Problem& pr, const Eigen::VectorXd& h);

struct SteinIdentityReport {
    double lhs = 0.0;  // E_pi[(A g)(Psi)], evaluated against the correction delta
    double rhs = 0.0;  // -pi(delta_a) * delta_ab(g)
    double rel_err = 0.0;
};

SteinIdentityReport check_stein_identity(const Problem& pr, const Generator& base,
                                         const Eigen::VectorXd& g, const DifferenceResult& diff);

// Distribution of the total number of points: sums v over states of equal total.
Eigen::VectorXd project_counts(const StateSpace& space, const Eigen::VectorXd& v);

// Exact sup over all d1-Lipschitz h of |delta_ab(g_h)|, by transport duality
// on the solver's functional weights.  Same size guard as d2_exact.
double h2_sup_exact(const Problem& pr, const SteinSolver& solver);

struct RateRow {
    double lambda = 0.0;
    std::size_t states = 0;
    double p = 0.0;        // perturbed stationary mass of the one-point configuration at a
    double sym_err = 0.0;
    double v00 = 0.0, v01 = 0.0, v10 = 0.0, v11 = 0.0;  // |delta_ab(g_h)| per test function
    double v_star = 0.0;
    double bound = 0.0;    // uniform bound above
    bool bound_ok = false;
    double stein_rel_err = 0.0;  // two-way expectation check on the (1,1) solution
    double count_tv = 0.0;       // tv between the count laws of perturbed and base chains
    double count_sup = 0.0;      // one-dimensional sup of the solution difference at site 1
    double count_rel_err = 0.0;  // |count_tv - p*count_sup| / (p*count_sup)
    double count_ratio = 0.0;    // count_tv * lambda / p, no log factor expected
    double v_ratio = 0.0;        // v_star * lambda / log(lambda)
    double proxy_over_count = 0.0;  // (p * v_star) / count_tv, expected to grow like log
    double d2 = 0.0, d2_gap = 0.0;  // exact transport distance, NaN when skipped
    double d2_lo = 0.0, d2_hi = 0.0;
    double leak = 0.0;
    double tail = 0.0;
};

// with_d2 additionally computes the exact transport distance when the space
// is within the d2_exact guard.
RateRow rate_row(const Problem& pr, bool with_d2 = false);

}  // namespace steinlab::pp

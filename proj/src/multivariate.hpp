#pragma once

#include "generator.hpp"
#include "solvers.hpp"

#include <optional>
#include <vector>

namespace steinlab::multi {

// Product immigration-death process on a box in Z_+^d with immigration rate
// lambda*mu_i and unit per-capita death rate per coordinate, plus the
// two-site perturbation: at K+e1 the coordinate-2 birth and coordinate-1
// death rates each gain 1/2, mirrored at K+e2, where K_i = floor(lambda mu_i).
struct Problem {
    double lambda = 0.0;
    Eigen::VectorXd mu;
    std::vector<int> n_max;
    std::vector<int> site;  // K
    SpacePtr space;
    std::size_t idx_k = 0, idx_ke1 = 0, idx_ke2 = 0, idx_ke12 = 0;
};

// Empty n_max selects the default per-coordinate truncation
// ceil(lambda mu_i + 12 sqrt(lambda mu_i) + 20).
Problem make_problem(double lambda, const Eigen::VectorXd& mu, std::vector<int> n_max = {},
                     std::size_t max_states = kDefaultMaxStates);

struct Pmf {
    ProbVec p;
    double tail_mass = 0.0;
};

// Product of truncated Poisson(lambda mu_i) marginals; exactly stationary for
// the truncated unperturbed process.
Pmf product_pmf(const Problem& pr);

Generator base_generator(const Problem& pr);
// Fails unless mu_1 == mu_2: without that symmetry the perturbed mass at K+e1
// and K+e2 would differ and the two-point identities below would not close.
Generator perturbed_generator(const Problem& pr);

// Delta_ij g(w) (second difference towards +e_i, +e_j); fails when the target
// states leave the box.
double second_difference(const Eigen::VectorXd& g, const StateSpace& space, std::size_t w, int i,
                         int j);

struct SteinIdentityReport {
    double lhs = 0.0;      // E_pi[(A g)(W)], evaluated against the correction delta
    double rhs = 0.0;      // -pi(K+e1) * Delta_12 g(K)
    double rel_err = 0.0;
};

// For any g: the base-generator expectation under the perturbed stationary
// law collapses to a single second difference at K.
SteinIdentityReport check_stein_identity(const Problem& pr, const Generator& base,
                                         const Eigen::VectorXd& g, const DifferenceResult& diff);

struct CornerReport {
    bool applicable = false;  // lambda large enough for the guarantee
    double value = 0.0;       // |Delta_12 g_h(w)| for h = quadrant indicator
    double bound = 0.0;       // log(lambda) / (20 lambda sqrt(mu1 mu2))
    bool ok = false;
};

// h = indicator of {w1 <= K1, w2 <= K2}; the second difference at any state
// with (w1, w2) = (K1, K2) is guaranteed above `bound` once
// lambda >= (e/(32 pi)) (mu1 ^ mu2)^{-2}.  Default site: K itself.
CornerReport corner_lower_bound(const Problem& pr, const SteinSolver& solver,
                                std::optional<std::size_t> site = std::nullopt);

struct QuadReport {
    double lhs = 0.0;  // max over interior w of |sum_ij alpha_i alpha_j Delta_ij g(w)|
    double rhs = 0.0;  // min((1+2log+(2 lambda))/(2 lambda) sum alpha_i^2/mu_i, sum alpha_i^2)
    std::size_t argmax_state = 0;
    bool ok = false;
};

QuadReport quadratic_bound_check(const Problem& pr, const Eigen::VectorXd& g,
                                 const Eigen::VectorXd& alpha);

struct RateRow {
    double lambda = 0.0;
    std::size_t states = 0;
    double p = 0.0;        // perturbed stationary mass at K+e1
    double d_tv = 0.0;     // half l1 norm of the stationary difference
    double sup = 0.0;      // sup over indicator h of |Delta_12 g_h(K)|
    double rel_err = 0.0;  // identity defect |d_tv - p*sup|/(p*sup)
    double lower = 0.0;    // quadrant guarantee, 0 when not applicable
    double upper = 0.0;    // (1+2log+(2 lambda))(mu1+mu2)/(2 lambda mu1 mu2)
    bool applicable = false;
    double ratio = 0.0;    // d_tv * lambda / (p * log lambda)
    double sym_err = 0.0;  // |pi(K+e1) - pi(K+e2)| / p
    double mean_err = 0.0; // worst relative defect of E W_i against lambda mu_i
    double leak = 0.0;
    double tail = 0.0;
};

RateRow rate_row(const Problem& pr);

}  // namespace steinlab::multi

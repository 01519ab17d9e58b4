#include "univariate.hpp"

#include "distances.hpp"

#include <cmath>

namespace steinlab::uni {

namespace {

int default_n_max(double lambda) {
    return static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 20.0));
}

double birth_rate(const Problem& pr, int j) { return pr.lambda + (j == pr.k ? 1.0 : 0.0); }
double death_rate(const Problem& pr, int j) {
    return static_cast<double>(j) + (j == pr.k ? 1.0 : 0.0);
}

Generator make_generator(const Problem& pr, bool perturbed) {
    Problem base = pr;
    if (!perturbed) base.k = -1;  // no state matches, so the rates are unperturbed
    return assemble(pr.space, [base](std::size_t idx, int, int dir) {
        const int j = static_cast<int>(idx);
        return dir > 0 ? birth_rate(base, j) : death_rate(base, j);
    });
}

}  // namespace

Problem make_problem(double lambda, int k, int n_max, std::size_t max_states) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail(ErrorCode::invalid_argument, "lambda must be positive and finite");
    Problem pr;
    pr.lambda = lambda;
    pr.k = k > 0 ? k : std::max(1, static_cast<int>(std::floor(lambda)));
    pr.n_max = n_max > 0 ? n_max : default_n_max(lambda);
    if (pr.k > pr.n_max)
        fail(ErrorCode::invalid_argument, "perturbation site " + std::to_string(pr.k) +
                                              " lies beyond the truncation " +
                                              std::to_string(pr.n_max));
    pr.space = StateSpace::interval(pr.n_max, max_states);
    return pr;
}

Pmf poisson_pmf(double lambda, const SpacePtr& space) {
    if (!space || space->kind() != SpaceKind::interval)
        fail(ErrorCode::invalid_argument, "univariate pmf needs an interval space");
    const auto n = static_cast<Eigen::Index>(space->size());
    Eigen::VectorXd w(n);
    const double ll = std::log(lambda);
    for (Eigen::Index j = 0; j < n; ++j)
        w[j] = std::exp(static_cast<double>(j) * ll - std::lgamma(static_cast<double>(j) + 1.0) -
                        lambda);
    const double kept = w.sum();
    Pmf out;
    out.tail_mass = std::max(0.0, 1.0 - kept);
    out.p = ProbVec{space, w / kept};
    return out;
}

Generator base_generator(const Problem& pr) { return make_generator(pr, false); }
Generator perturbed_generator(const Problem& pr) { return make_generator(pr, true); }

ProbVec perturbed_stationary_closed_form(const Problem& pr) {
    const auto n = static_cast<Eigen::Index>(pr.space->size());
    Eigen::VectorXd logw(n);
    logw[0] = 0.0;
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        logw[j + 1] = logw[j] + std::log(birth_rate(pr, static_cast<int>(j))) -
                      std::log(death_rate(pr, static_cast<int>(j) + 1));
    logw.array() -= logw.maxCoeff();
    Eigen::VectorXd w = logw.array().exp();
    return ProbVec{pr.space, w / w.sum()};
}

RecursionSolution stein_solution(double lambda, const Eigen::VectorXd& h, const Pmf& pmf) {
    const Eigen::VectorXd& p = pmf.p.p;
    const Eigen::Index n = p.size();
    if (h.size() != n) fail(ErrorCode::invalid_argument, "test function size mismatch");
    const Eigen::VectorXd hh = h.array() - p.dot(h);

    Eigen::VectorXd fwd(n), bwd(n);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) fwd[j] = (acc += p[j] * hh[j]);
    acc = 0.0;
    for (Eigen::Index j = n - 1; j >= 0; --j) bwd[j] = (acc += p[j] * hh[j]);

    const auto mode = static_cast<Eigen::Index>(std::floor(lambda));
    RecursionSolution sol;
    sol.g.resize(n);
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        sol.g[j + 1] = (j < mode ? fwd[j] : -bwd[j + 1]) / (lambda * p[j]);
    sol.g[0] = n > 1 ? sol.g[1] : 0.0;

    double worst = 0.0;
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        worst = std::max(worst, std::abs(lambda * sol.g[j + 1] -
                                         static_cast<double>(j) * sol.g[j] - hh[j]));
    sol.residual = worst;
    if (worst > kSteinResidualTol * std::max(1.0, hh.cwiseAbs().maxCoeff()))
        fail(ErrorCode::numeric, "recursion residual " + std::to_string(worst) + " exceeds tolerance");
    return sol;
}

Eigen::VectorXd delta_weights(double lambda, int k, const Pmf& pmf) {
    const Eigen::VectorXd& p = pmf.p.p;
    const Eigen::Index n = p.size();
    if (k < 1 || k + 1 >= n)
        fail(ErrorCode::invalid_argument, "difference site must satisfy 1 <= k <= n_max - 1");

    // Cumulative mass below (inclusive) and above k, each a plain sum of
    // positives, so that the weights come out with full relative accuracy.
    double below_km1 = 0.0, below_k = 0.0;
    for (Eigen::Index j = 0; j <= k; ++j) {
        if (j <= k - 1) below_km1 += p[j];
        below_k += p[j];
    }
    double above_k = 0.0, above_km1 = 0.0;
    for (Eigen::Index j = n - 1; j >= k; --j) {
        if (j >= k + 1) above_k += p[j];
        above_km1 += p[j];
    }

    const double lo = above_k / p[k] - above_km1 / p[k - 1];
    const double mid = above_k / p[k] + below_km1 / p[k - 1];
    const double hi = below_km1 / p[k - 1] - below_k / p[k];
    Eigen::VectorXd c(n);
    for (Eigen::Index j = 0; j < n; ++j)
        c[j] = p[j] / lambda * (j < k ? lo : j == k ? mid : hi);
    return c;
}

double sup_delta_g(double lambda, int k, const Pmf& pmf) {
    return 0.5 * delta_weights(lambda, k, pmf).lpNorm<1>();
}

IdentityReport check_distance_identity(const Problem& pr) {
    const Generator base = base_generator(pr);
    const Generator pert = perturbed_generator(pr);
    const Pmf pmf = poisson_pmf(pr.lambda, pr.space);
    // The difference solve keeps d_tv and p_k relatively accurate even when k
    // sits in the far tail, where subtracting two O(1) distributions would
    // leave nothing but roundoff.
    const DifferenceResult diff = stationary_difference(pert, base, pmf.p);

    IdentityReport rep;
    rep.lambda = pr.lambda;
    rep.k = pr.k;
    rep.n_max = pr.n_max;
    rep.p_k = diff.pi[static_cast<std::size_t>(pr.k)];
    rep.d_tv = 0.5 * diff.delta.lpNorm<1>();
    rep.sup = sup_delta_g(pr.lambda, pr.k, pmf);
    const double rhs = rep.p_k * rep.sup;
    rep.rel_err = std::abs(rep.d_tv - rhs) / std::max(rhs, 1e-300);
    rep.leak = truncation_leak(pert, diff.pi);
    rep.tail = pmf.tail_mass;
    return rep;
}

NormReport check_norm_bounds(double lambda, const SpacePtr& space) {
    const Pmf pmf = poisson_pmf(lambda, space);
    const auto n = static_cast<Eigen::Index>(space->size());
    NormReport rep;
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
        h[j] = 1.0;
        const RecursionSolution sol = stein_solution(lambda, h, pmf);
        rep.sup_g = std::max(rep.sup_g, sol.g.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            rep.sup_dg = std::max(rep.sup_dg, std::abs(sol.g[i + 1] - sol.g[i]));
    }
    rep.bound_g = std::min(1.0, std::sqrt(2.0 / (lambda * std::exp(1.0))));
    rep.bound_dg = (1.0 - std::exp(-lambda)) / lambda;
    rep.ok = rep.sup_g <= rep.bound_g * (1.0 + 1e-12) && rep.sup_dg <= rep.bound_dg * (1.0 + 1e-12);
    return rep;
}

RatioProfile distance_ratio_profile(double lambda, const SpacePtr& space) {
    const Pmf pmf = poisson_pmf(lambda, space);
    const int n_max = static_cast<int>(space->size()) - 1;
    Problem pr;
    pr.lambda = lambda;
    pr.n_max = n_max;
    pr.space = space;
    const Generator base = base_generator(pr);
    RatioProfile prof;
    for (int k = 1; k + 1 <= n_max; ++k) {
        pr.k = k;
        const DifferenceResult diff =
            stationary_difference(perturbed_generator(pr), base, pmf.p);
        prof.k.push_back(k);
        prof.ratio.push_back(0.5 * diff.delta.lpNorm<1>() /
                             diff.pi[static_cast<std::size_t>(k)]);
        prof.sup.push_back(sup_delta_g(lambda, k, pmf));
    }
    return prof;
}

RateRow rate_row(const Problem& pr) {
    const double lambda = pr.lambda;
    const IdentityReport rep = check_distance_identity(pr);
    RateRow row;
    row.lambda = rep.lambda;
    row.k = rep.k;
    row.n_max = rep.n_max;
    row.p_k = rep.p_k;
    row.d_tv = rep.d_tv;
    row.sup_dg = rep.sup;
    row.rel_err = rep.rel_err;
    row.leak = rep.leak;
    row.tail = rep.tail;
    row.dtv_l32 = rep.d_tv * std::pow(lambda, 1.5);
    row.p_sqrtl = rep.p_k * std::sqrt(lambda);
    row.sup_l = rep.sup * lambda;
    return row;
}

}  // namespace steinlab::uni

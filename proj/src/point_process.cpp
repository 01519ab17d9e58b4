#include "point_process.hpp"

#include "univariate.hpp"

#include <cmath>
#include <limits>

namespace steinlab::pp {

namespace {

std::size_t find_or_fail(const StateSpace& space, const std::vector<int>& c, const char* what) {
    const auto idx = space.find(c);
    if (!idx) fail(ErrorCode::invalid_argument, std::string(what) + " missing from the space");
    return *idx;
}

Problem finish_problem(Problem pr, std::size_t max_states) {
    pr.space = StateSpace::configurations(pr.carrier, pr.n_total_max, pr.n_ab_max, max_states);
    const auto d = static_cast<std::size_t>(pr.carrier.num_points());
    std::vector<int> c(d, 0);
    pr.idx_empty = find_or_fail(*pr.space, c, "empty configuration");
    c[static_cast<std::size_t>(pr.carrier.a_index())] = 1;
    pr.idx_a = find_or_fail(*pr.space, c, "one-point configuration at a");
    c[static_cast<std::size_t>(pr.carrier.b_index())] = 1;
    pr.idx_ab = find_or_fail(*pr.space, c, "two-point configuration at a and b");
    c[static_cast<std::size_t>(pr.carrier.a_index())] = 0;
    pr.idx_b = find_or_fail(*pr.space, c, "one-point configuration at b");
    return pr;
}

}  // namespace

Problem make_problem(double lambda_total, int s_size, int n_total_max, int n_ab_max,
                     std::size_t max_states) {
    return make_problem(Carrier::make(s_size, lambda_total), n_total_max, n_ab_max, max_states);
}

Problem make_problem(const Carrier& carrier, int n_total_max, int n_ab_max,
                     std::size_t max_states) {
    Problem pr;
    pr.carrier = carrier;
    pr.n_total_max =
        n_total_max > 0
            ? n_total_max
            : static_cast<int>(std::ceil(carrier.lambda_total +
                                         12.0 * std::sqrt(carrier.lambda_total) + 20.0));
    pr.n_ab_max = n_ab_max;
    return finish_problem(std::move(pr), max_states);
}

Pmf product_pmf(const Problem& pr) {
    const std::vector<double> rates = pr.carrier.intensity();
    const std::size_t n = pr.space->size();
    Eigen::VectorXd logw(static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < n; ++s) {
        const auto c = pr.space->state(s);
        double lw = 0.0;
        for (std::size_t i = 0; i < rates.size(); ++i)
            lw += c[i] * std::log(rates[i]) - std::lgamma(c[i] + 1.0);
        logw[static_cast<Eigen::Index>(s)] = lw;
    }
    // Pre-normalization mass of state s is exp(logw - |lambda|); the kept mass
    // only matters for the tail report, the pmf itself is renormalized anyway.
    Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp();
    const double scale = w.sum();
    double kept = 0.0;
    for (Eigen::Index s = 0; s < w.size(); ++s)
        kept += std::exp(logw[s] - pr.carrier.lambda_total);
    Pmf out;
    out.tail_mass = std::max(0.0, 1.0 - kept);
    out.p = ProbVec{pr.space, w / scale};
    return out;
}

Generator base_generator(const Problem& pr) {
    const SpacePtr space = pr.space;
    const std::vector<double> rates = pr.carrier.intensity();
    return assemble(space, [space, rates](std::size_t idx, int coord, int dir) {
        if (dir > 0) return rates[static_cast<std::size_t>(coord)];
        return static_cast<double>(space->state(idx)[static_cast<std::size_t>(coord)]);
    });
}

Generator perturbed_generator(const Problem& pr) {
    const SpacePtr space = pr.space;
    const std::vector<double> rates = pr.carrier.intensity();
    const int a = pr.carrier.a_index(), b = pr.carrier.b_index();
    const std::size_t at_a = pr.idx_a, at_b = pr.idx_b;
    return assemble(space, [space, rates, a, b, at_a, at_b](std::size_t idx, int coord, int dir) {
        double rate;
        if (dir > 0) {
            rate = rates[static_cast<std::size_t>(coord)];
            if ((idx == at_a && coord == b) || (idx == at_b && coord == a)) rate += 0.5;
        } else {
            rate = static_cast<double>(space->state(idx)[static_cast<std::size_t>(coord)]);
            if ((idx == at_a && coord == a) || (idx == at_b && coord == b)) rate += 0.5;
        }
        return rate;
    });
}

Eigen::VectorXd test_function(const Problem& pr, int m_a, int m_b) {
    if (m_a < 0 || m_b < 0) fail(ErrorCode::invalid_argument, "negative multiplicity");
    const std::size_t n = pr.space->size();
    const auto a = static_cast<std::size_t>(pr.carrier.a_index());
    const auto b = static_cast<std::size_t>(pr.carrier.b_index());
    Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t s = 0; s < n; ++s) {
        const auto c = pr.space->state(s);
        if (c[a] != m_a || c[b] != m_b) continue;
        long total = 0;
        for (int v : c) total += v;
        if (total > 0) h[static_cast<Eigen::Index>(s)] = 1.0 / static_cast<double>(total);
    }
    return h;
}

double delta_ab(const Problem& pr, const Eigen::VectorXd& g) {
    return g[static_cast<Eigen::Index>(pr.idx_ab)] - g[static_cast<Eigen::Index>(pr.idx_a)] -
           g[static_cast<Eigen::Index>(pr.idx_b)] + g[static_cast<Eigen::Index>(pr.idx_empty)];
}

double uniform_bound(double lambda_total) {
    const double logp = std::max(0.0, std::log(2.0 * lambda_total / 5.0));
    return std::min(1.0, 5.0 / (2.0 * lambda_total) * (1.0 + 2.0 * logp));
}

LipschitzReport check_h2(const Problem& pr, const Eigen::VectorXd& h) {
    return check_d1_lipschitz(h, *pr.space);
}

SteinIdentityReport check_stein_identity(const Problem& pr, const Generator& base,
                                         const Eigen::VectorXd& g, const DifferenceResult& diff) {
    // E_pi[(A g)] with pi = pi0 + delta: the pi0 term vanishes because the
    // truncated product law is exactly stationary for the truncated base
    // chain, so the expectation is evaluated against delta alone.  That keeps
    // full relative accuracy even when the answer sits near exp(-lambda).
    SteinIdentityReport rep;
    rep.lhs = compensated_dot(diff.delta, base.q * g);
    rep.rhs = -diff.pi[pr.idx_a] * delta_ab(pr, g);
    rep.rel_err = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.rhs), 1e-300);
    return rep;
}

Eigen::VectorXd project_counts(const StateSpace& space, const Eigen::VectorXd& v) {
    if (space.total_cap() < 0)
        fail(ErrorCode::invalid_argument, "count projection needs a total-count-capped space");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.total_cap() + 1);
    for (std::size_t s = 0; s < space.size(); ++s) {
        long total = 0;
        for (int c : space.state(s)) total += c;
        out[static_cast<Eigen::Index>(total)] += v[static_cast<Eigen::Index>(s)];
    }
    return out;
}

double h2_sup_exact(const Problem& pr, const SteinSolver& solver) {
    const std::size_t m = pr.space->size();
    if (m > kExactD2MaxStates)
        fail(ErrorCode::capacity, "space too large for the exact Lipschitz sup");
    const Eigen::VectorXd c = solver.functional_weights({{pr.idx_empty, 1.0},
                                                         {pr.idx_a, -1.0},
                                                         {pr.idx_b, -1.0},
                                                         {pr.idx_ab, 1.0}});
    Eigen::VectorXd plus = c.cwiseMax(0.0), minus = (-c).cwiseMax(0.0);
    const double ta = plus.sum(), tb = minus.sum();
    if (ta == 0.0 || tb == 0.0) return 0.0;
    minus *= ta / tb;
    const Carrier& car = pr.carrier;
    const auto& space = *pr.space;
    const auto res = min_cost_transport(plus, minus, [&](std::size_t i, std::size_t j) {
        return d1(space.state(i), space.state(j), car);
    });
    return res.cost;
}

RateRow rate_row(const Problem& pr, bool with_d2) {
    const Generator base = base_generator(pr);
    const Generator pert = perturbed_generator(pr);
    const Pmf pmf = product_pmf(pr);
    const DifferenceResult diff = stationary_difference(pert, base, pmf.p);
    const double lambda = pr.carrier.lambda_total;

    RateRow row;
    row.lambda = lambda;
    row.states = pr.space->size();
    row.p = diff.pi[pr.idx_a];
    row.sym_err = std::abs(diff.pi[pr.idx_a] - diff.pi[pr.idx_b]) / row.p;

    SteinSolver solver(base, pmf.p);
    double* slots[4] = {&row.v00, &row.v01, &row.v10, &row.v11};
    const int mas[4] = {0, 0, 1, 1}, mbs[4] = {0, 1, 0, 1};
    Eigen::VectorXd g11;
    for (int t = 0; t < 4; ++t) {
        const Eigen::VectorXd h = test_function(pr, mas[t], mbs[t]);
        const Eigen::VectorXd hc = h.array() - pmf.p.p.dot(h);
        const SteinSolution sol = solver.solve(hc);
        *slots[t] = std::abs(delta_ab(pr, sol.g));
        if (t == 3) g11 = sol.g;
    }
    row.v_star = std::max(std::max(row.v00, row.v01), std::max(row.v10, row.v11));
    row.bound = uniform_bound(lambda);
    row.bound_ok = row.v_star <= row.bound * (1.0 + 1e-12);
    row.stein_rel_err = check_stein_identity(pr, base, g11, diff).rel_err;

    const Eigen::VectorXd delta_cnt = project_counts(*pr.space, diff.delta);
    row.count_tv = 0.5 * delta_cnt.lpNorm<1>();
    const auto count_space = StateSpace::interval(pr.space->total_cap());
    row.count_sup = uni::sup_delta_g(lambda, 1, uni::poisson_pmf(lambda, count_space));
    const double rhs = row.p * row.count_sup;
    row.count_rel_err = std::abs(row.count_tv - rhs) / std::max(rhs, 1e-300);
    row.count_ratio = row.count_tv * lambda / row.p;
    row.v_ratio = row.v_star * lambda / std::log(lambda);
    row.proxy_over_count = row.p * row.v_star / row.count_tv;

    row.d2_lo = row.p * row.v_star;
    row.d2_hi = row.p * row.bound;
    if (with_d2 && pr.space->size() <= kExactD2MaxStates) {
        const TransportResult res = d2_exact(diff.pi, pmf.p);
        row.d2 = res.cost;
        row.d2_gap = res.dual_gap;
    } else {
        row.d2 = std::numeric_limits<double>::quiet_NaN();
        row.d2_gap = std::numeric_limits<double>::quiet_NaN();
    }
    row.leak = truncation_leak(pert, diff.pi);
    row.tail = pmf.tail_mass;
    return row;
}

}  // namespace steinlab::pp

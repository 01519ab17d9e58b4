#include "distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace steinlab {

double tv(const ProbVec& p, const ProbVec& q) {
    if (!p.space || !q.space || !p.space->same_shape(*q.space) || p.p.size() != q.p.size())
        fail(ErrorCode::invalid_argument, "total variation needs two distributions on one space");
    return 0.5 * (p.p - q.p).lpNorm<1>();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double round_cost(double c) {
    if (!std::isfinite(c) || c < 0.0)
        fail(ErrorCode::invalid_argument, "transport costs must be finite and nonnegative");
    return std::nearbyint(c * 1e12) / 1e12;
}

}  // namespace

TransportResult min_cost_transport(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                                   const std::function<double(std::size_t, std::size_t)>& cost) {
    std::vector<std::size_t> src, dst;
    double total_a = 0.0, total_b = 0.0;
    for (Eigen::Index i = 0; i < supply.size(); ++i) {
        if (supply[i] < 0.0) fail(ErrorCode::invalid_argument, "negative supply mass");
        if (supply[i] > 0.0) src.push_back(static_cast<std::size_t>(i)), total_a += supply[i];
    }
    for (Eigen::Index j = 0; j < demand.size(); ++j) {
        if (demand[j] < 0.0) fail(ErrorCode::invalid_argument, "negative demand mass");
        if (demand[j] > 0.0) dst.push_back(static_cast<std::size_t>(j)), total_b += demand[j];
    }
    const double total = std::max(total_a, total_b);
    if (std::abs(total_a - total_b) > 1e-12 * std::max(total, 1e-300))
        fail(ErrorCode::invalid_argument, "transport masses are unbalanced");
    TransportResult res;
    if (src.empty() || dst.empty()) return res;

    const std::size_t ns = src.size(), nt = dst.size(), nv = ns + nt;
    Eigen::MatrixXd c(ns, nt);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nt; ++j) c(i, j) = round_cost(cost(src[i], dst[j]));

    std::vector<double> a(ns), b(nt);
    for (std::size_t i = 0; i < ns; ++i) a[i] = supply[static_cast<Eigen::Index>(src[i])];
    for (std::size_t j = 0; j < nt; ++j) b[j] = demand[static_cast<Eigen::Index>(dst[j])];
    const std::vector<double> a0 = a, b0 = b;

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(ns, nt);
    std::vector<double> pot(nv, 0.0);
    std::vector<double> dist(nv);
    std::vector<int> parent(nv);
    std::vector<char> done(nv);

    double rem_a = total_a, rem_b = total_b;
    const double mass_tol = 1e-12 * total;
    const std::size_t max_aug = 50 * nv + 100;
    while (rem_a > mass_tol && rem_b > mass_tol) {
        // Dijkstra on reduced costs; node v < ns is supply v, else demand v-ns.
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < ns; ++i)
            if (a[i] > 0.0) dist[i] = 0.0;
        std::size_t target = nv;
        while (true) {
            std::size_t u = nv;
            double best = kInf;
            for (std::size_t v = 0; v < nv; ++v)
                if (!done[v] && dist[v] < best) best = dist[v], u = v;
            if (u == nv) break;  // nothing reachable
            done[u] = 1;
            if (u >= ns && b[u - ns] > 0.0) {
                target = u;
                break;
            }
            if (u < ns) {
                for (std::size_t j = 0; j < nt; ++j) {
                    double rc = c(u, j) + pot[u] - pot[ns + j];
                    if (rc < 0.0) rc = 0.0;
                    if (dist[u] + rc < dist[ns + j])
                        dist[ns + j] = dist[u] + rc, parent[ns + j] = static_cast<int>(u);
                }
            } else {
                const std::size_t j = u - ns;
                for (std::size_t i = 0; i < ns; ++i) {
                    if (f(i, j) <= 0.0) continue;
                    double rc = -c(i, j) + pot[u] - pot[i];
                    if (rc < 0.0) rc = 0.0;
                    if (dist[u] + rc < dist[i]) dist[i] = dist[u] + rc, parent[i] = static_cast<int>(u);
                }
            }
        }
        if (target == nv) break;  // leftover dust with no reachable demand
        const double reach = dist[target];
        for (std::size_t v = 0; v < nv; ++v) pot[v] += std::min(dist[v], reach);

        // Node chain from the reached demand back to the starting source.  It
        // alternates demand, source, demand, ... so arcs along the path are
        // source->demand (forward) and demand->source (residual).
        std::vector<std::size_t> chain;
        for (std::size_t v = target;; v = static_cast<std::size_t>(parent[v])) {
            chain.push_back(v);
            if (parent[v] == -1) break;
        }
        double theta = std::min(b[target - ns], a[chain.back()]);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i)
            if (chain[i] < ns)  // residual arc chain[i+1] (demand) -> chain[i] (source)
                theta = std::min(theta, f(chain[i], chain[i + 1] - ns));
        if (!(theta > 0.0)) fail(ErrorCode::numeric, "transport augmentation stalled");

        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            const std::size_t to = chain[i], from = chain[i + 1];
            if (from < ns) {  // forward arc
                f(from, to - ns) += theta;
            } else {  // residual arc carries flow f(to, from - ns)
                double& cell = f(to, from - ns);
                cell = cell <= theta ? 0.0 : cell - theta;
            }
        }
        {
            double& sa = a[chain.back()];
            sa = sa <= theta ? 0.0 : sa - theta;
            double& sb = b[target - ns];
            sb = sb <= theta ? 0.0 : sb - theta;
        }
        rem_a -= theta;
        rem_b -= theta;
        if (++res.augmentations > max_aug)
            fail(ErrorCode::numeric, "transport exceeded the augmentation budget");
    }

    double primal = 0.0, dual = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nt; ++j) primal += f(i, j) * c(i, j);
    for (std::size_t i = 0; i < ns; ++i) dual -= a0[i] * pot[i];
    for (std::size_t j = 0; j < nt; ++j) dual += b0[j] * pot[ns + j];
    res.cost = primal;
    res.dual_gap = primal - dual;
    return res;
}

double d1(std::span<const int> xi, std::span<const int> eta, const Carrier& carrier) {
    const auto np = static_cast<std::size_t>(carrier.num_points());
    if (xi.size() != np || eta.size() != np)
        fail(ErrorCode::invalid_argument, "configuration size does not match the carrier");
    long n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < np; ++i) {
        if (xi[i] < 0 || eta[i] < 0) fail(ErrorCode::invalid_argument, "negative multiplicity");
        n1 += xi[i];
        n2 += eta[i];
    }
    if (n1 != n2) return 1.0;
    if (n1 == 0) return 0.0;
    const double n = static_cast<double>(n1);
    if (carrier.discrete_metric()) {
        long overlap = 0;
        for (std::size_t i = 0; i < np; ++i) overlap += std::min(xi[i], eta[i]);
        return 1.0 - static_cast<double>(overlap) / n;
    }
    Eigen::VectorXd mu(np), nu(np);
    for (std::size_t i = 0; i < np; ++i) {
        mu[static_cast<Eigen::Index>(i)] = xi[i];
        nu[static_cast<Eigen::Index>(i)] = eta[i];
    }
    const auto res = min_cost_transport(
        mu, nu, [&](std::size_t i, std::size_t j) { return carrier.d0(i, j); });
    return res.cost / n;
}

LipschitzReport check_d1_lipschitz(const Eigen::VectorXd& h, const StateSpace& space) {
    if (space.kind() != SpaceKind::configurations || !space.carrier())
        fail(ErrorCode::invalid_argument, "Lipschitz check needs a configuration space");
    const std::size_t m = space.size();
    if (h.size() != static_cast<Eigen::Index>(m))
        fail(ErrorCode::invalid_argument, "test function size mismatch");
    const Carrier& car = *space.carrier();

    // States grouped by (bit-identical) h value; only cross-group pairs can
    // violate the Lipschitz property.
    std::map<double, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < m; ++i) groups[h[static_cast<Eigen::Index>(i)]].push_back(i);

    double cross = 0.0;
    for (auto g1 = groups.begin(); g1 != groups.end(); ++g1)
        for (auto g2 = std::next(g1); g2 != groups.end(); ++g2)
            cross += static_cast<double>(g1->second.size()) * static_cast<double>(g2->second.size());
    if (cross > 5e8)
        fail(ErrorCode::capacity, "too many value-distinct state pairs for the exhaustive check");

    LipschitzReport rep;
    for (auto g1 = groups.begin(); g1 != groups.end(); ++g1) {
        for (auto g2 = std::next(g1); g2 != groups.end(); ++g2) {
            const double diff = std::abs(g1->first - g2->first);
            for (std::size_t i : g1->second) {
                for (std::size_t j : g2->second) {
                    const double margin = diff - d1(space.state(i), space.state(j), car);
                    ++rep.pairs_checked;
                    if (margin > rep.worst_margin) {
                        rep.worst_margin = margin;
                        rep.worst_xi = i;
                        rep.worst_eta = j;
                    }
                }
            }
        }
    }
    rep.ok = rep.worst_margin <= 1e-12;
    return rep;
}

TransportResult d2_exact(const ProbVec& p, const ProbVec& q) {
    if (!p.space || !q.space || !p.space->same_shape(*q.space))
        fail(ErrorCode::invalid_argument, "d2 needs two distributions on one space");
    if (p.space->kind() != SpaceKind::configurations || !p.space->carrier())
        fail(ErrorCode::invalid_argument, "d2 is defined on configuration spaces");
    const std::size_t m = p.space->size();
    if (m > kExactD2MaxStates)
        fail(ErrorCode::capacity,
             "space too large for exact d2 (" + std::to_string(m) + " states); use d2_lower_bound");
    const Carrier& car = *p.space->carrier();

    Eigen::VectorXd diff = p.p - q.p;
    Eigen::VectorXd mu = diff.cwiseMax(0.0), nu = (-diff).cwiseMax(0.0);
    // Equalize the tiny rounding imbalance so the transport is exactly feasible.
    const double ta = mu.sum(), tb = nu.sum();
    if (ta == 0.0 || tb == 0.0) return {};
    nu *= ta / tb;

    std::vector<std::size_t> sup_s, sup_t;
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu[i] > 0.0) sup_s.push_back(static_cast<std::size_t>(i));
        if (nu[i] > 0.0) sup_t.push_back(static_cast<std::size_t>(i));
    }
    Eigen::MatrixXd cost(sup_s.size(), sup_t.size());
    for (std::size_t i = 0; i < sup_s.size(); ++i)
        for (std::size_t j = 0; j < sup_t.size(); ++j)
            cost(i, j) = d1(p.space->state(sup_s[i]), p.space->state(sup_t[j]), car);

    Eigen::VectorXd ms(sup_s.size()), mt(sup_t.size());
    for (std::size_t i = 0; i < sup_s.size(); ++i) ms[static_cast<Eigen::Index>(i)] = mu[static_cast<Eigen::Index>(sup_s[i])];
    for (std::size_t j = 0; j < sup_t.size(); ++j) mt[static_cast<Eigen::Index>(j)] = nu[static_cast<Eigen::Index>(sup_t[j])];
    return min_cost_transport(ms, mt,
                              [&](std::size_t i, std::size_t j) { return cost(i, j); });
}

double d2_lower_bound(const ProbVec& p, const ProbVec& q, const Eigen::VectorXd& h) {
    if (!p.space || !q.space || !p.space->same_shape(*q.space))
        fail(ErrorCode::invalid_argument, "d2 bound needs two distributions on one space");
    const LipschitzReport rep = check_d1_lipschitz(h, *p.space);
    if (!rep.ok)
        fail(ErrorCode::invalid_argument,
             "test function is not 1-Lipschitz under d1 (worst margin " +
                 std::to_string(rep.worst_margin) + ")");
    return std::abs(p.p.dot(h) - q.p.dot(h));
}

}  // namespace steinlab

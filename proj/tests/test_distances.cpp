#include <doctest.h>

#include "distances.hpp"
#include "point_process.hpp"
#include "univariate.hpp"

#include <array>
#include <random>

using namespace steinlab;

namespace {

ProbVec prob(const SpacePtr& sp, std::initializer_list<double> vals) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double v : vals) p[i++] = v;
    return ProbVec{sp, p};
}

}  // namespace

TEST_CASE("total variation distance") {
    const SpacePtr sp = StateSpace::interval(2);
    const ProbVec p = prob(sp, {0.5, 0.3, 0.2});
    const ProbVec q = prob(sp, {0.2, 0.3, 0.5});
    CHECK(tv(p, q) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(tv(p, p) == 0.0);

    const ProbVec longer = prob(StateSpace::interval(3), {0.25, 0.25, 0.25, 0.25});
    CHECK_THROWS_AS(tv(p, longer), Error);
}

TEST_CASE("transport on a 2x2 instance") {
    Eigen::VectorXd supply(2), demand(2);
    supply << 0.6, 0.4;
    demand << 0.3, 0.7;
    const auto cost = [](std::size_t i, std::size_t j) { return i == j ? 0.0 : 1.0; };
    const TransportResult res = min_cost_transport(supply, demand, cost);
    CHECK(res.cost == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::abs(res.dual_gap) <= 1e-12);
}

TEST_CASE("2x2 transport optimum sits at an endpoint of the single free variable") {
    // with x = mass on route (0,0), feasibility pins x to an interval and the
    // objective is linear in x, so the exact optimum is one of the endpoints
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd supply(2), demand(2);
        supply << u(rng) + 0.1, u(rng) + 0.1;
        demand << u(rng) + 0.1, 0.0;
        demand[1] = supply.sum() - demand[0];
        if (demand[1] <= 0.0) continue;
        std::array<double, 4> c{u(rng), u(rng), u(rng), u(rng)};
        const auto cost = [&c](std::size_t i, std::size_t j) { return c[2 * i + j]; };

        const double lo = std::max(0.0, supply[0] - demand[1]);
        const double hi = std::min(supply[0], demand[0]);
        const auto objective = [&](double x) {
            return c[0] * x + c[1] * (supply[0] - x) + c[2] * (demand[0] - x) +
                   c[3] * (demand[1] - supply[0] + x);
        };
        const double best = std::min(objective(lo), objective(hi));
        const TransportResult res = min_cost_transport(supply, demand, cost);
        CHECK(res.cost == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("transport duality gap vanishes on random instances") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd supply(8), demand(5);
        for (Eigen::Index i = 0; i < 8; ++i) supply[i] = u(rng) + 0.01;
        for (Eigen::Index j = 0; j < 5; ++j) demand[j] = u(rng) + 0.01;
        demand *= supply.sum() / demand.sum();
        Eigen::MatrixXd c(8, 5);
        for (Eigen::Index i = 0; i < 8; ++i)
            for (Eigen::Index j = 0; j < 5; ++j) c(i, j) = u(rng);
        const TransportResult res = min_cost_transport(
            supply, demand, [&c](std::size_t i, std::size_t j) {
                return c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            });
        CHECK(std::abs(res.dual_gap) <= 1e-9 * std::max(1.0, res.cost));
        CHECK(res.cost >= -1e-15);
    }
}

TEST_CASE("matching distance between configurations") {
    const Carrier carrier = Carrier::make(1, 4.0);
    const std::array<int, 3> empty{0, 0, 0};
    const std::array<int, 3> at_a{0, 1, 0};
    const std::array<int, 3> at_b{0, 0, 1};
    const std::array<int, 3> s_and_a{1, 1, 0};
    const std::array<int, 3> s_and_b{1, 0, 1};

    CHECK(d1(empty, empty, carrier) == 0.0);
    CHECK(d1(at_a, at_a, carrier) == 0.0);
    CHECK(d1(at_a, at_b, carrier) == 1.0);
    // shared point matches free of charge, the marked pair costs 1, total 2
    CHECK(d1(s_and_a, s_and_b, carrier) == doctest::Approx(0.5).epsilon(1e-12));
    // unequal totals always cost 1
    CHECK(d1(empty, at_a, carrier) == 1.0);
    CHECK(d1(at_a, s_and_a, carrier) == 1.0);
}

TEST_CASE("matching distance under a custom ground metric") {
    Eigen::MatrixXd d0(2, 2);
    d0 << 0.0, 0.3, 0.3, 0.0;
    const Carrier carrier = Carrier::make(2, 4.0, d0);
    const std::array<int, 4> at_s0{1, 0, 0, 0};
    const std::array<int, 4> at_s1{0, 1, 0, 0};
    const std::array<int, 4> at_a{0, 0, 1, 0};
    CHECK(d1(at_s0, at_s1, carrier) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(d1(at_s0, at_a, carrier) == 1.0);

    // two-point configurations: optimal matching picks the cheap pairing
    const std::array<int, 4> two_s{1, 1, 0, 0};
    const std::array<int, 4> s0_a{1, 0, 1, 0};
    CHECK(d1(two_s, s0_a, carrier) == doctest::Approx(0.5 * (0.0 + 1.0)).epsilon(1e-12));
}

TEST_CASE("lipschitz certificate") {
    const pp::Problem pr = pp::make_problem(3.0, 1, 8, 2);
    const Eigen::VectorXd h = pp::test_function(pr, 1, 0);
    const LipschitzReport ok = check_d1_lipschitz(h, *pr.space);
    CHECK(ok.ok);
    CHECK(ok.worst_margin <= 1e-12);
    CHECK(ok.pairs_checked > 0);

    const LipschitzReport bad = check_d1_lipschitz(3.0 * h, *pr.space);
    CHECK(!bad.ok);
    CHECK(bad.worst_margin > 0.0);
    CHECK(std::abs(h[static_cast<Eigen::Index>(bad.worst_xi)] * 3.0 -
                   h[static_cast<Eigen::Index>(bad.worst_eta)] * 3.0) > 0.0);
}

TEST_CASE("exact transport distance between laws on configuration space") {
    const pp::Problem pr = pp::make_problem(3.0, 1, 3, 1);
    const pp::Pmf pmf = pp::product_pmf(pr);
    CHECK(d2_exact(pmf.p, pmf.p).cost == 0.0);

    // move mass between two configurations at known matching distance 1/2
    const std::array<int, 3> xi{1, 1, 0};
    const std::array<int, 3> eta{1, 0, 1};
    const auto i_xi = pr.space->find(xi), i_eta = pr.space->find(eta);
    REQUIRE(i_xi.has_value());
    REQUIRE(i_eta.has_value());
    const double eps = 1e-3;
    ProbVec q = pmf.p;
    q.p[static_cast<Eigen::Index>(*i_xi)] -= eps;
    q.p[static_cast<Eigen::Index>(*i_eta)] += eps;
    const TransportResult res = d2_exact(pmf.p, q);
    CHECK(res.cost == doctest::Approx(eps * 0.5).epsilon(1e-9));
    CHECK(std::abs(res.dual_gap) <= 1e-12);
}

TEST_CASE("expectation gap of a certified function bounds the transport distance") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 10, 2);
    const pp::Pmf pmf = pp::product_pmf(pr);
    const ProbVec pi = stationary(pp::perturbed_generator(pr));
    const Eigen::VectorXd h = pp::test_function(pr, 1, 1);

    const double lb = d2_lower_bound(pi, pmf.p, h);
    const double exact = d2_exact(pi, pmf.p).cost;
    CHECK(lb <= exact * (1.0 + 1e-9) + 1e-15);
    CHECK(exact > 0.0);

    CHECK_THROWS_AS(d2_lower_bound(pi, pmf.p, Eigen::VectorXd(3.0 * h)), Error);
}

TEST_CASE("transport guard rejects oversized spaces") {
    const pp::Problem pr = pp::make_problem(16.0, 1, 0, 6);
    REQUIRE(pr.space->size() > kExactD2MaxStates);
    const pp::Pmf pmf = pp::product_pmf(pr);
    try {
        d2_exact(pmf.p, pmf.p);
        FAIL("expected a capacity error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::capacity);
    }
}

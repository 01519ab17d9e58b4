#include <doctest.h>

#include "point_process.hpp"

#include <array>
#include <cmath>
#include <random>

using namespace steinlab;

TEST_CASE("problem construction") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 12, 2);
    CHECK(pr.n_total_max == 12);
    CHECK(pr.n_ab_max == 2);
    CHECK(pr.space->size() == 99);
    CHECK(std::vector<int>(pr.space->state(pr.idx_empty).begin(),
                           pr.space->state(pr.idx_empty).end()) == std::vector<int>{0, 0, 0});
    CHECK(std::vector<int>(pr.space->state(pr.idx_a).begin(), pr.space->state(pr.idx_a).end()) ==
          std::vector<int>{0, 1, 0});
    CHECK(std::vector<int>(pr.space->state(pr.idx_b).begin(), pr.space->state(pr.idx_b).end()) ==
          std::vector<int>{0, 0, 1});
    CHECK(std::vector<int>(pr.space->state(pr.idx_ab).begin(), pr.space->state(pr.idx_ab).end()) ==
          std::vector<int>{0, 1, 1});

    // default truncation scales like the intensity
    const pp::Problem def = pp::make_problem(16.0);
    CHECK(def.n_total_max == static_cast<int>(std::ceil(16.0 + 12.0 * 4.0 + 20.0)));

    CHECK_THROWS_AS(pp::make_problem(1.0), Error);  // carrier needs lambda > sqrt(2)

    const pp::Problem wide = pp::make_problem(5.0, 3, 8, 2);
    CHECK(wide.space->dim() == 5);
    CHECK(wide.carrier.a_index() == 3);
}

TEST_CASE("product pmf is exactly stationary for the truncated base chain") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 12, 2);
    const pp::Pmf pmf = pp::product_pmf(pr);
    CHECK(std::abs(pmf.p.p.sum() - 1.0) <= 1e-13);
    const Generator base = pp::base_generator(pr);
    const Eigen::VectorXd residual = base.q.transpose() * pmf.p.p;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-14 * base.max_exit_rate);
    // the empty configuration carries roughly e^{-lambda}; the tight caps on
    // the marked points shift the normalization at the few-permille level
    CHECK(pmf.p[pr.idx_empty] == doctest::Approx(std::exp(-4.0)).epsilon(0.01));
}

TEST_CASE("slowly decaying test functions") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 12, 2);
    const Eigen::VectorXd h10 = pp::test_function(pr, 1, 0);
    CHECK(h10[static_cast<Eigen::Index>(pr.idx_a)] == 1.0);
    CHECK(h10[static_cast<Eigen::Index>(pr.idx_b)] == 0.0);
    CHECK(h10[static_cast<Eigen::Index>(pr.idx_ab)] == 0.0);
    CHECK(h10[static_cast<Eigen::Index>(pr.idx_empty)] == 0.0);
    const auto two_s_one_a = pr.space->find(std::array<int, 3>{2, 1, 0});
    REQUIRE(two_s_one_a.has_value());
    CHECK(h10[static_cast<Eigen::Index>(*two_s_one_a)] == doctest::Approx(1.0 / 3.0));

    const Eigen::VectorXd h00 = pp::test_function(pr, 0, 0);
    CHECK(h00[static_cast<Eigen::Index>(pr.idx_empty)] == 0.0);
    const auto one_s = pr.space->find(std::array<int, 3>{1, 0, 0});
    REQUIRE(one_s.has_value());
    CHECK(h00[static_cast<Eigen::Index>(*one_s)] == 1.0);

    const Eigen::VectorXd h11 = pp::test_function(pr, 1, 1);
    const auto full = pr.space->find(std::array<int, 3>{1, 1, 1});
    REQUIRE(full.has_value());
    CHECK(h11[static_cast<Eigen::Index>(*full)] == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(pp::test_function(pr, -1, 0), Error);

    // all four are certified 1-Lipschitz; a scaled copy is not
    for (int ma : {0, 1})
        for (int mb : {0, 1}) {
            CAPTURE(ma);
            CAPTURE(mb);
            CHECK(pp::check_h2(pr, pp::test_function(pr, ma, mb)).ok);
        }
    CHECK(!pp::check_h2(pr, Eigen::VectorXd(3.0 * h10)).ok);
}

TEST_CASE("uniform smoothness bound") {
    CHECK(pp::uniform_bound(10.0) ==
          doctest::Approx(0.25 * (1.0 + 2.0 * std::log(4.0))).epsilon(1e-15));
    CHECK(pp::uniform_bound(1.8) == 1.0);  // the 5/(2 lambda) branch exceeds one
}

TEST_CASE("gauge choice does not move the second difference") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 16, 3);
    const Generator base = pp::base_generator(pr);
    const pp::Pmf pmf = pp::product_pmf(pr);
    const Eigen::VectorXd h = pp::test_function(pr, 1, 1);
    const Eigen::VectorXd hc = h.array() - pmf.p.p.dot(h);

    const SteinSolution at_empty = solve_stein(base, hc, &pmf.p, pr.idx_empty);
    const SteinSolution at_auto = solve_stein(base, hc, &pmf.p);
    CHECK(std::abs(pp::delta_ab(pr, at_empty.g) - pp::delta_ab(pr, at_auto.g)) <= 1e-9);
}

TEST_CASE("expectation identity holds for arbitrary g") {
    const pp::Problem pr = pp::make_problem(6.0, 1, 0, 4);
    const Generator base = pp::base_generator(pr);
    const Generator pert = pp::perturbed_generator(pr);
    const pp::Pmf pmf = pp::product_pmf(pr);
    const DifferenceResult diff = stationary_difference(pert, base, pmf.p);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd g(static_cast<Eigen::Index>(pr.space->size()));
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = gauss(rng);
        CHECK(pp::check_stein_identity(pr, base, g, diff).rel_err <= 1e-11);
    }
}

TEST_CASE("count projection") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 12, 2);
    const pp::Pmf pmf = pp::product_pmf(pr);
    const Eigen::VectorXd counts = pp::project_counts(*pr.space, pmf.p.p);
    REQUIRE(counts.size() == 13);
    CHECK(std::abs(counts.sum() - 1.0) <= 1e-13);
    CHECK(counts[0] == doctest::Approx(pmf.p[pr.idx_empty]).epsilon(1e-15));
    // one-point mass splits across the three locations
    const auto one_s = pr.space->find(std::array<int, 3>{1, 0, 0});
    REQUIRE(one_s.has_value());
    CHECK(counts[1] == doctest::Approx(pmf.p[*one_s] + pmf.p[pr.idx_a] + pmf.p[pr.idx_b])
                           .epsilon(1e-14));
}

TEST_CASE("transport bracket on a small instance") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 16, 3);
    REQUIRE(pr.space->size() == 224);
    const pp::RateRow row = pp::rate_row(pr, true);

    CHECK(std::isfinite(row.d2));
    CHECK(row.d2 >= row.d2_lo * (1.0 - 1e-9));
    CHECK(row.d2 <= row.d2_hi * (1.0 + 1e-12));
    CHECK(std::abs(row.d2_gap) <= 1e-12);

    // duality: the exact transport equals p times the exact lipschitz sup
    const pp::Pmf pmf = pp::product_pmf(pr);
    const SteinSolver solver(pp::base_generator(pr), pmf.p);
    const double sup = pp::h2_sup_exact(pr, solver);
    CHECK(sup >= row.v_star * (1.0 - 1e-12));
    CHECK(row.d2 == doctest::Approx(row.p * sup).epsilon(1e-9));

    CHECK(row.stein_rel_err <= 1e-10);
    CHECK(row.sym_err <= 1e-12);
    CHECK(row.bound_ok);
    CHECK(row.v11 > 0.0);
    CHECK(row.v_star >= row.v11);

    // The marked-point cap of 3 puts ~2e-3 of Poisson(1/4) mass on saturated
    // states, where the count projection stops being Markov; the count
    // identity survives only to that order.  Roomier caps restore it.
    CHECK(row.count_rel_err <= 1e-3);
    const pp::RateRow roomy = pp::rate_row(pp::make_problem(4.0, 1, 16, 6));
    CHECK(roomy.count_rel_err <= 1e-6);
}

TEST_CASE("oversized spaces skip the exact transport") {
    const pp::Problem pr = pp::make_problem(16.0);
    REQUIRE(pr.space->size() > kExactD2MaxStates);
    const pp::RateRow row = pp::rate_row(pr, true);
    CHECK(std::isnan(row.d2));
    CHECK(row.d2_lo > 0.0);
    CHECK(row.stein_rel_err <= 1e-10);
}

TEST_CASE("three ordinary locations smoke") {
    const pp::Problem pr = pp::make_problem(5.0, 3, 8, 2);
    const pp::RateRow row = pp::rate_row(pr);
    CHECK(row.sym_err <= 1e-10);
    CHECK(row.stein_rel_err <= 1e-9);
    CHECK(row.bound_ok);
}

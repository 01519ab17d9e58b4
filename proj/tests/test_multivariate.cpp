#include <doctest.h>

#include "multivariate.hpp"

#include <random>

using namespace steinlab;

namespace {

Eigen::VectorXd half_half() { return Eigen::VectorXd::Constant(2, 0.5); }

}  // namespace

TEST_CASE("problem validation") {
    CHECK_THROWS_AS(multi::make_problem(4.0, Eigen::VectorXd::Constant(1, 1.0)), Error);
    CHECK_THROWS_AS(multi::make_problem(-4.0, half_half()), Error);

    Eigen::VectorXd bad_sum(2);
    bad_sum << 0.5, 0.6;
    CHECK_THROWS_AS(multi::make_problem(4.0, bad_sum), Error);
    Eigen::VectorXd negative(2);
    negative << 1.5, -0.5;
    CHECK_THROWS_AS(multi::make_problem(4.0, negative), Error);

    CHECK_THROWS_AS(multi::make_problem(4.0, half_half(), {9}), Error);      // length mismatch
    CHECK_THROWS_AS(multi::make_problem(8.0, half_half(), {4, 10}), Error);  // site+e1 off the box

    const multi::Problem pr = multi::make_problem(8.0, half_half(), {9, 9});
    CHECK(pr.site == std::vector<int>{4, 4});
    CHECK(pr.space->size() == 100);
    CHECK(std::vector<int>(pr.space->state(pr.idx_k).begin(), pr.space->state(pr.idx_k).end()) ==
          std::vector<int>{4, 4});
    CHECK(pr.space->neighbor(pr.idx_k, 0, +1) == pr.idx_ke1);
    CHECK(pr.space->neighbor(pr.idx_k, 1, +1) == pr.idx_ke2);
    CHECK(pr.space->neighbor(pr.idx_ke1, 1, +1) == pr.idx_ke12);

    // unequal weights cannot carry the mirrored perturbation
    Eigen::VectorXd skew(2);
    skew << 0.3, 0.7;
    const multi::Problem sk = multi::make_problem(10.0, skew);
    CHECK_THROWS_AS(multi::perturbed_generator(sk), Error);
}

TEST_CASE("product pmf is exactly stationary for the truncated base chain") {
    const multi::Problem pr = multi::make_problem(5.0, half_half(), {12, 12});
    const multi::Pmf pmf = multi::product_pmf(pr);
    CHECK(std::abs(pmf.p.p.sum() - 1.0) <= 1e-13);
    const Generator base = multi::base_generator(pr);
    const Eigen::VectorXd residual = base.q.transpose() * pmf.p.p;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-14 * base.max_exit_rate);
}

TEST_CASE("second difference needs room in the box") {
    const multi::Problem pr = multi::make_problem(8.0, half_half(), {9, 9});
    const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(100, 0.0, 1.0);
    CHECK(multi::second_difference(g, *pr.space, pr.idx_k, 0, 1) ==
          doctest::Approx(0.0).epsilon(1e-15));
    const auto corner = pr.space->find(std::array<int, 2>{9, 9});
    REQUIRE(corner.has_value());
    CHECK_THROWS_AS(multi::second_difference(g, *pr.space, *corner, 0, 1), Error);
}

TEST_CASE("generator expectation collapses to the corner second difference") {
    const multi::Problem pr = multi::make_problem(6.0, half_half());
    const Generator base = multi::base_generator(pr);
    const Generator pert = multi::perturbed_generator(pr);
    const multi::Pmf pmf = multi::product_pmf(pr);
    const DifferenceResult diff = stationary_difference(pert, base, pmf.p);

    // the identity holds for arbitrary g, not only Stein solutions
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd g(static_cast<Eigen::Index>(pr.space->size()));
        for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = gauss(rng);
        const multi::SteinIdentityReport rep = multi::check_stein_identity(pr, base, g, diff);
        CHECK(rep.rel_err <= 1e-11);
    }
}

TEST_CASE("corner guarantee and quadratic bound") {
    const multi::Problem pr = multi::make_problem(8.0, half_half());
    const multi::Pmf pmf = multi::product_pmf(pr);
    const SteinSolver solver(multi::base_generator(pr), pmf.p);

    const multi::CornerReport rep = multi::corner_lower_bound(pr, solver);
    CHECK(rep.applicable);  // threshold at equal weights is about 0.108
    CHECK(rep.ok);
    CHECK(rep.value >= rep.bound);
    CHECK(rep.bound == doctest::Approx(std::log(8.0) / (20.0 * 8.0 * 0.5)).epsilon(1e-15));

    // below the threshold the guarantee is vacuous but still reported
    const multi::Problem small = multi::make_problem(0.05, half_half());
    const multi::Pmf small_pmf = multi::product_pmf(small);
    const SteinSolver small_solver(multi::base_generator(small), small_pmf.p);
    const multi::CornerReport vac = multi::corner_lower_bound(small, small_solver);
    CHECK(!vac.applicable);
    CHECK(vac.ok);

    // a site away from the corner is rejected
    CHECK_THROWS_AS(multi::corner_lower_bound(pr, solver, pr.idx_ke12), Error);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd h(static_cast<Eigen::Index>(pr.space->size()));
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = gauss(rng);
    const Eigen::VectorXd hc = h.array() - pmf.p.p.dot(h);
    const SteinSolution sol = solver.solve(hc);
    Eigen::VectorXd alpha(2);
    alpha << 1.0, 1.0;
    CHECK(multi::quadratic_bound_check(pr, sol.g, alpha).ok);
    alpha << 1.0, 0.0;
    CHECK(multi::quadratic_bound_check(pr, sol.g, alpha).ok);
    alpha << 0.6, -0.8;
    const multi::QuadReport quad = multi::quadratic_bound_check(pr, sol.g, alpha);
    CHECK(quad.ok);
    CHECK(quad.lhs <= quad.rhs);
    Eigen::VectorXd wrong(3);
    wrong << 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(multi::quadratic_bound_check(pr, sol.g, wrong), Error);
}

TEST_CASE("functional weights reproduce every indicator exhaustively") {
    const multi::Problem pr = multi::make_problem(2.0, half_half(), {2, 2});
    REQUIRE(pr.space->size() == 9);
    const multi::Pmf pmf = multi::product_pmf(pr);
    const SteinSolver solver(multi::base_generator(pr), pmf.p);
    const Eigen::VectorXd c = solver.functional_weights({{pr.idx_k, 1.0},
                                                         {pr.idx_ke1, -1.0},
                                                         {pr.idx_ke2, -1.0},
                                                         {pr.idx_ke12, 1.0}});
    CHECK(std::abs(c.sum()) <= 1e-12);

    double sup = 0.0;
    for (unsigned mask = 0; mask < (1u << 9); ++mask) {
        Eigen::VectorXd h = Eigen::VectorXd::Zero(9);
        for (int j = 0; j < 9; ++j)
            if (mask & (1u << j)) h[j] = 1.0;
        const Eigen::VectorXd hc = h.array() - pmf.p.p.dot(h);
        const SteinSolution sol = solver.solve(hc);
        const double direct = multi::second_difference(sol.g, *pr.space, pr.idx_k, 0, 1);
        CHECK(std::abs(c.dot(h) - direct) <= 1e-11);
        sup = std::max(sup, std::abs(direct));
    }
    CHECK(sup == doctest::Approx(0.5 * c.lpNorm<1>()).epsilon(1e-11));
}

TEST_CASE("rate row closes the distance identity") {
    const multi::RateRow row = multi::rate_row(multi::make_problem(6.0, half_half()));
    CHECK(row.rel_err <= 1e-10);
    CHECK(row.sym_err <= 1e-12);
    CHECK(row.mean_err <= 1e-10);
    CHECK(row.applicable);
    CHECK(row.lower <= row.sup);
    CHECK(row.sup <= row.upper);
    CHECK(row.d_tv == doctest::Approx(row.p * row.sup).epsilon(1e-10));
    CHECK(row.leak <= 1e-20);
}

TEST_CASE("three coordinates, identity per truncation") {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
    const multi::Problem pr = multi::make_problem(6.0, mu, {16, 16, 16});
    CHECK(pr.space->size() == 17 * 17 * 17);
    const multi::RateRow row = multi::rate_row(pr);
    CHECK(row.rel_err <= 1e-8);
    CHECK(row.sym_err <= 1e-10);
    CHECK(row.mean_err <= 1e-8);
    CHECK(row.sup <= row.upper * (1.0 + 1e-12));
}

#include <doctest.h>

#include "generator.hpp"
#include "multivariate.hpp"
#include "point_process.hpp"
#include "simulate.hpp"
#include "univariate.hpp"

using namespace steinlab;

namespace {

double entry(const SpMat& q, std::size_t i, std::size_t j) {
    return q.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double max_row_sum(const Generator& gen) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(gen.size()));
    return (gen.q * ones).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("assembled generators are conservative") {
    const uni::Problem pr = uni::make_problem(3.0, 2, 10);
    const Generator base = uni::base_generator(pr);
    const Generator pert = uni::perturbed_generator(pr);
    CHECK(max_row_sum(base) <= 1e-12 * base.max_exit_rate);
    CHECK(max_row_sum(pert) <= 1e-12 * pert.max_exit_rate);
    CHECK(base.irreducible);
    CHECK(pert.irreducible);

    // only the boundary state loses rate, and it loses exactly its birth rate
    for (int j = 0; j < 10; ++j) CHECK(base.dropped[j] == 0.0);
    CHECK(base.dropped[10] == 3.0);
    CHECK(pert.dropped[10] == 3.0);
    // the dropped boundary birth does not count as exit rate, so the max sits
    // at state 9 (birth 3 + death 9), not at the boundary
    CHECK(base.max_exit_rate == doctest::Approx(12.0));
}

TEST_CASE("univariate perturbation touches one state") {
    const uni::Problem pr = uni::make_problem(3.0, 2, 10);
    const Generator base = uni::base_generator(pr);
    const Generator pert = uni::perturbed_generator(pr);

    CHECK(entry(base.q, 2, 3) == 3.0);
    CHECK(entry(base.q, 2, 1) == 2.0);
    CHECK(entry(pert.q, 2, 3) == 4.0);  // birth lambda + 1 at the perturbed state
    CHECK(entry(pert.q, 2, 1) == 3.0);  // death k + 1 there
    CHECK(entry(pert.q, 2, 2) == -7.0);

    SpMat diff = pert.q - base.q;
    diff.prune(0.0);
    CHECK(diff.nonZeros() == 3);  // two jump rates and the diagonal, all in row k
    for (int c = 0; c < diff.outerSize(); ++c)
        for (SpMat::InnerIterator it(diff, c); it; ++it) CHECK(it.row() == 2);
}

TEST_CASE("multivariate perturbation mirrors across the two marked sites") {
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(2, 0.5);
    const multi::Problem pr = multi::make_problem(8.0, mu, {9, 9});
    const Generator base = multi::base_generator(pr);
    const Generator pert = multi::perturbed_generator(pr);
    CHECK(max_row_sum(pert) <= 1e-12 * pert.max_exit_rate);

    // K = (4,4); at K+e1 the coordinate-2 birth and coordinate-1 death gain 1/2
    CHECK(pr.space->neighbor(pr.idx_ke1, 1, +1) == pr.idx_ke12);
    CHECK(pr.space->neighbor(pr.idx_ke1, 0, -1) == pr.idx_k);
    CHECK(entry(base.q, pr.idx_ke1, pr.idx_ke12) == 4.0);
    CHECK(entry(pert.q, pr.idx_ke1, pr.idx_ke12) == 4.5);
    CHECK(entry(base.q, pr.idx_ke1, pr.idx_k) == 5.0);
    CHECK(entry(pert.q, pr.idx_ke1, pr.idx_k) == 5.5);
    // mirrored at K+e2
    CHECK(entry(pert.q, pr.idx_ke2, pr.idx_ke12) == 4.5);
    CHECK(entry(pert.q, pr.idx_ke2, pr.idx_k) == 5.5);

    SpMat diff = pert.q - base.q;
    diff.prune(0.0);
    CHECK(diff.nonZeros() == 6);
    for (int c = 0; c < diff.outerSize(); ++c)
        for (SpMat::InnerIterator it(diff, c); it; ++it)
            CHECK((static_cast<std::size_t>(it.row()) == pr.idx_ke1 ||
                   static_cast<std::size_t>(it.row()) == pr.idx_ke2));
}

TEST_CASE("point-process perturbation acts from the two one-point configurations") {
    const pp::Problem pr = pp::make_problem(4.0, 1, 12, 2);
    const Generator base = pp::base_generator(pr);
    const Generator pert = pp::perturbed_generator(pr);
    CHECK(max_row_sum(pert) <= 1e-12 * pert.max_exit_rate);

    const int a = pr.carrier.a_index(), b = pr.carrier.b_index();
    CHECK(pr.space->neighbor(pr.idx_a, b, +1) == pr.idx_ab);
    CHECK(pr.space->neighbor(pr.idx_a, a, -1) == pr.idx_empty);
    CHECK(entry(base.q, pr.idx_a, pr.idx_ab) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(entry(pert.q, pr.idx_a, pr.idx_ab) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(entry(base.q, pr.idx_a, pr.idx_empty) == 1.0);
    CHECK(entry(pert.q, pr.idx_a, pr.idx_empty) == 1.5);
    CHECK(entry(pert.q, pr.idx_b, pr.idx_ab) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(entry(pert.q, pr.idx_b, pr.idx_empty) == 1.5);

    SpMat diff = pert.q - base.q;
    diff.prune(0.0);
    CHECK(diff.nonZeros() == 6);
}

TEST_CASE("rate rule errors") {
    const SpacePtr sp = StateSpace::interval(4);
    CHECK_THROWS_AS(assemble(sp, [](std::size_t, int, int) { return -1.0; }), Error);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(assemble(sp, [nan](std::size_t, int, int) { return nan; }), Error);
}

TEST_CASE("zero-rate chain is flagged reducible") {
    const SpacePtr sp = StateSpace::interval(3);
    const Generator gen = assemble(sp, [](std::size_t idx, int, int dir) {
        if (dir > 0) return idx == 1 ? 0.0 : 1.0;  // no births out of state 1
        return idx == 2 ? 0.0 : static_cast<double>(idx);  // no deaths out of state 2
    });
    CHECK(!gen.irreducible);
}

TEST_CASE("truncation leak is the pi-weighted dropped rate") {
    const uni::Problem pr = uni::make_problem(2.0, 1, 8);
    const Generator gen = uni::base_generator(pr);
    const uni::Pmf pmf = uni::poisson_pmf(2.0, pr.space);
    const double want = pmf.p[8] * 2.0;
    CHECK(truncation_leak(gen, pmf.p) == doctest::Approx(want).epsilon(1e-14));

    const uni::Pmf other = uni::poisson_pmf(2.0, StateSpace::interval(9));
    CHECK_THROWS_AS(truncation_leak(gen, other.p), Error);
}

TEST_CASE("occupation estimate converges to the stationary law") {
    const uni::Problem pr = uni::make_problem(2.0, 1, 12);
    const Generator gen = uni::perturbed_generator(pr);
    const ProbVec sim = simulate_occupation(gen, 200000, 7);
    const ProbVec exact = uni::perturbed_stationary_closed_form(pr);
    double dist = 0.0;
    for (Eigen::Index i = 0; i < sim.p.size(); ++i) dist += std::abs(sim.p[i] - exact.p[i]);
    CHECK(0.5 * dist <= 0.02);

    // deterministic for a fixed seed
    const ProbVec again = simulate_occupation(gen, 200000, 7);
    CHECK((again.p - sim.p).cwiseAbs().maxCoeff() == 0.0);
}

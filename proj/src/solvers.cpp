#include "solvers.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace steinlab {

namespace {

// Largest entry magnitude of a dense vector, 0 for empty.
double max_abs(const Eigen::VectorXd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

// Turn a raw nonnegative solution into a ProbVec: clamp roundoff negatives,
// renormalize.  Genuine negatives mean the solve went wrong.
ProbVec finalize_distribution(SpacePtr space, Eigen::VectorXd x) {
    const double top = max_abs(x);
    if (!(top > 0.0) || !std::isfinite(top))
        fail(ErrorCode::numeric, "stationary solve produced a degenerate vector");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) {
            if (x[i] < -1e-10 * top)
                fail(ErrorCode::numeric, "stationary solve produced a negative mass of " +
                                             std::to_string(x[i] / top) + " relative at state " +
                                             std::to_string(i));
            x[i] = 0.0;
        }
    }
    x /= x.sum();
    return ProbVec{std::move(space), std::move(x)};
}

// Residual of the balance equations: max_y |sum_x pi(x) q(x,y)|.
double balance_residual(const Generator& gen, const Eigen::VectorXd& pi) {
    return max_abs(gen.q.transpose() * pi);
}

void require_solvable(const Generator& gen) {
    if (gen.size() == 0)
        fail(ErrorCode::invalid_argument, "empty generator");
    if (!gen.irreducible)
        fail(ErrorCode::reducible, "generator is not irreducible; stationary distribution is not unique");
}

// Copy of the rate matrix with row and column `drop` removed.
SpMat reduced_matrix(const SpMat& q, std::size_t drop) {
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(q.nonZeros()));
    for (int col = 0; col < q.outerSize(); ++col) {
        if (static_cast<std::size_t>(col) == drop) continue;
        const std::size_t cc = static_cast<std::size_t>(col) < drop ? col : col - 1;
        for (SpMat::InnerIterator it(q, col); it; ++it) {
            const auto row = static_cast<std::size_t>(it.row());
            if (row == drop) continue;
            const std::size_t rr = row < drop ? row : row - 1;
            trips.emplace_back(static_cast<int>(rr), static_cast<int>(cc), it.value());
        }
    }
    SpMat out(static_cast<int>(n - 1), static_cast<int>(n - 1));
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
}

Eigen::VectorXd drop_entry(const Eigen::VectorXd& v, std::size_t drop) {
    Eigen::VectorXd out(v.size() - 1);
    for (Eigen::Index i = 0, j = 0; i < v.size(); ++i)
        if (static_cast<std::size_t>(i) != drop) out[j++] = v[i];
    return out;
}

Eigen::VectorXd insert_entry(const Eigen::VectorXd& v, std::size_t at, double value) {
    Eigen::VectorXd out(v.size() + 1);
    for (Eigen::Index i = 0, j = 0; i < out.size(); ++i)
        out[i] = static_cast<std::size_t>(i) == at ? value : v[j++];
    return out;
}

// Solve M x = b with one step of iterative refinement.
Eigen::VectorXd solve_refined(const Eigen::SparseLU<SpMat>& lu, const SpMat& m,
                              const Eigen::VectorXd& b) {
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success)
        fail(ErrorCode::numeric, "sparse triangular solve failed");
    Eigen::VectorXd r = b - m * x;
    x += lu.solve(r);
    return x;
}

}  // namespace

// Subtraction-free GTH elimination.  Works on the dense rate matrix in place;
// all intermediate quantities are nonnegative, so the result is accurate to
// machine precision entrywise regardless of how small individual masses are.
static Eigen::VectorXd stationary_gth(const Generator& gen) {
    const auto m = static_cast<Eigen::Index>(gen.size());
    Eigen::MatrixXd a = Eigen::MatrixXd(gen.q);
    for (Eigen::Index n = m - 1; n >= 1; --n) {
        const double s = a.row(n).head(n).sum();
        if (!(s > 0.0))
            fail(ErrorCode::reducible, "GTH elimination hit an absorbing block at state " +
                                           std::to_string(n));
        a.col(n).head(n) /= s;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = a(i, n);
            if (w != 0.0) a.row(i).head(n) += w * a.row(n).head(n);
        }
    }
    Eigen::VectorXd x(m);
    x[0] = 1.0;
    for (Eigen::Index n = 1; n < m; ++n) x[n] = x.head(n).dot(a.col(n).head(n));
    return x;
}

// Sparse path: pin pi(ref) = 1, solve the transposed balance equations with
// the row and column of ref removed, then normalize.  One refinement pass
// keeps the residual near machine precision.
static Eigen::VectorXd stationary_sparse(const Generator& gen, std::size_t ref) {
    SpMat qt = SpMat(gen.q.transpose());
    SpMat a = reduced_matrix(qt, ref);
    Eigen::VectorXd rhs(a.rows());
    {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(qt.rows());
        for (SpMat::InnerIterator it(qt, static_cast<int>(ref)); it; ++it)
            col[it.row()] = it.value();
        rhs = -drop_entry(col, ref);
    }
    Eigen::SparseLU<SpMat> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        fail(ErrorCode::numeric, "sparse LU factorization of the balance equations failed");
    Eigen::VectorXd z = solve_refined(lu, a, rhs);
    if (!z.allFinite())
        fail(ErrorCode::numeric, "stationary solve overflowed; reference state mass too small");
    return insert_entry(z, ref, 1.0);
}

ProbVec stationary(const Generator& gen) {
    require_solvable(gen);
    const double tol = kStationaryTol * std::max(gen.max_exit_rate, 1.0);
    if (gen.size() <= kGthMaxStates) {
        ProbVec pi = finalize_distribution(gen.space, stationary_gth(gen));
        const double resid = balance_residual(gen, pi.p);
        if (resid > tol)
            fail(ErrorCode::numeric,
                 "stationary residual " + std::to_string(resid) + " exceeds tolerance");
        return pi;
    }
    ProbVec pi = finalize_distribution(gen.space, stationary_sparse(gen, 0));
    double resid = balance_residual(gen, pi.p);
    if (resid > tol) {
        // Pinning at state 0 conditions the system badly when state 0 carries
        // little mass; the first pass still localizes the bulk, so re-pin there.
        std::size_t heaviest = 0;
        pi.p.maxCoeff(&heaviest);
        pi = finalize_distribution(gen.space, stationary_sparse(gen, heaviest));
        resid = balance_residual(gen, pi.p);
    }
    if (resid > tol)
        fail(ErrorCode::numeric,
             "stationary residual " + std::to_string(resid) + " exceeds tolerance");
    return pi;
}

ProbVec stationary_power_iteration(const Generator& gen, std::size_t max_iters) {
    require_solvable(gen);
    const auto n = static_cast<Eigen::Index>(gen.size());
    const double big = 1.05 * std::max(gen.max_exit_rate, 1.0);
    Eigen::VectorXd p = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    const double tol = kStationaryTol * std::max(gen.max_exit_rate, 1.0);
    for (std::size_t it = 0; it < max_iters; ++it) {
        Eigen::VectorXd flow = gen.q.transpose() * p;
        if ((it & 127u) == 0 && max_abs(flow) <= tol)
            return finalize_distribution(gen.space, std::move(p));
        p += flow / big;
        p /= p.sum();
    }
    fail(ErrorCode::numeric, "power iteration did not reach the residual tolerance in " +
                                 std::to_string(max_iters) + " iterations");
}

// Stationary distribution of a perturbed chain, computed as a correction to a
// known base distribution.  With B the perturbed rate matrix and U = B - A the
// (sparse, few-row) rate difference, the unnormalized correction y solves
//   y B = -pi0 U,  y(ref) = 0,
// and pi = (pi0 + y)/(1 + sum y).  The right-hand side is assembled from U
// alone, so its entries are exact at the scale of pi0 on the perturbed rows;
// this is what lets delta come out with full relative accuracy even when it is
// dozens of orders of magnitude below pi0's bulk.
DifferenceResult stationary_difference(const Generator& perturbed, const Generator& base,
                                       const ProbVec& pi_base) {
    if (!base.space->same_shape(*perturbed.space))
        fail(ErrorCode::invalid_argument, "base and perturbed generators live on different spaces");
    if (pi_base.p.size() != static_cast<Eigen::Index>(base.size()))
        fail(ErrorCode::invalid_argument, "base distribution size mismatch");
    require_solvable(perturbed);

    SpMat u = SpMat(perturbed.q - base.q);
    u.prune(0.0, 0.0);
    std::vector<bool> row_touched(base.size(), false);
    for (int col = 0; col < u.outerSize(); ++col)
        for (SpMat::InnerIterator it(u, col); it; ++it) row_touched[it.row()] = true;
    double rows = 0;
    for (bool t : row_touched) rows += t ? 1.0 : 0.0;

    Eigen::VectorXd r = -(SpMat(u.transpose()) * pi_base.p);
    DifferenceResult out;
    out.perturbed_rows = rows;
    const double scale = max_abs(r);
    if (scale == 0.0) {
        out.pi = pi_base;
        out.delta = Eigen::VectorXd::Zero(pi_base.p.size());
        return out;
    }

    std::size_t ref = 0;
    pi_base.p.maxCoeff(&ref);

    SpMat bt = SpMat(perturbed.q.transpose());
    SpMat a = reduced_matrix(bt, ref);
    Eigen::SparseLU<SpMat> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        fail(ErrorCode::numeric, "sparse LU factorization of the perturbed balance equations failed");
    Eigen::VectorXd y_red = scale * solve_refined(lu, a, drop_entry(r, ref) / scale);
    if (!y_red.allFinite()) fail(ErrorCode::numeric, "perturbation correction solve overflowed");
    Eigen::VectorXd y = insert_entry(y_red, ref, 0.0);

    const double total = y.sum();
    const double z = 1.0 + total;
    if (!(z > 0.0))
        fail(ErrorCode::numeric, "perturbation too large for the difference formulation");
    out.delta = (y - total * pi_base.p) / z;
    out.pi = finalize_distribution(perturbed.space, pi_base.p + y);

    const double resid = balance_residual(perturbed, out.pi.p);
    if (resid > kStationaryTol * std::max(perturbed.max_exit_rate, 1.0))
        fail(ErrorCode::numeric,
             "perturbed stationary residual " + std::to_string(resid) + " exceeds tolerance");
    return out;
}

// ---------------------------------------------------------------------------

struct SteinSolver::Impl {
    SpacePtr space;
    ProbVec pi;
    std::size_t gauge;
    SpMat q;        // full rate matrix, kept for residual checks
    double max_exit;
    SpMat a;        // rate matrix with gauge row/column removed
    Eigen::SparseLU<SpMat> lu;
    // Transposed factorization, built on first functional_weights call.
    mutable std::unique_ptr<SpMat> at;
    mutable std::unique_ptr<Eigen::SparseLU<SpMat>> lut;

    const Eigen::SparseLU<SpMat>& transposed() const {
        if (!lut) {
            at = std::make_unique<SpMat>(a.transpose());
            lut = std::make_unique<Eigen::SparseLU<SpMat>>();
            lut->compute(*at);
            if (lut->info() != Eigen::Success)
                fail(ErrorCode::numeric, "sparse LU factorization of the adjoint system failed");
        }
        return *lut;
    }
};

SteinSolver::SteinSolver(const Generator& gen, ProbVec pi, std::size_t gauge_state) {
    require_solvable(gen);
    if (!gen.space->same_shape(*pi.space) ||
        pi.p.size() != static_cast<Eigen::Index>(gen.size()))
        fail(ErrorCode::invalid_argument, "distribution does not match the generator's space");
    if (gauge_state == kGaugeAuto) {
        std::size_t heaviest = 0;
        pi.p.maxCoeff(&heaviest);
        gauge_state = heaviest;
    }
    if (gauge_state >= gen.size())
        fail(ErrorCode::invalid_argument, "gauge state out of range");
    impl_ = std::make_unique<Impl>();
    impl_->space = gen.space;
    impl_->pi = std::move(pi);
    impl_->gauge = gauge_state;
    impl_->q = gen.q;
    impl_->max_exit = gen.max_exit_rate;
    impl_->a = reduced_matrix(gen.q, gauge_state);
    impl_->lu.compute(impl_->a);
    if (impl_->lu.info() != Eigen::Success)
        fail(ErrorCode::numeric, "sparse LU factorization of the Stein system failed");
}

SteinSolver::~SteinSolver() = default;
SteinSolver::SteinSolver(SteinSolver&&) noexcept = default;
SteinSolver& SteinSolver::operator=(SteinSolver&&) noexcept = default;

const ProbVec& SteinSolver::pi() const { return impl_->pi; }

SteinSolution SteinSolver::solve(const Eigen::VectorXd& rhs) const {
    const Impl& im = *impl_;
    if (rhs.size() != im.pi.p.size())
        fail(ErrorCode::invalid_argument, "right-hand side size mismatch");
    const double top = std::max(1.0, max_abs(rhs));
    const double mean = im.pi.p.dot(rhs);
    if (std::abs(mean) > 1e-8 * top)
        fail(ErrorCode::invalid_argument,
             "right-hand side is not centered against the stationary distribution (mean " +
                 std::to_string(mean) + ")");
    Eigen::VectorXd b = rhs.array() - mean;  // exact centering of the remainder

    Eigen::VectorXd g_red = solve_refined(im.lu, im.a, drop_entry(b, im.gauge));
    if (!g_red.allFinite()) fail(ErrorCode::numeric, "Stein solve overflowed");

    SteinSolution sol;
    sol.space = im.space;
    sol.gauge_state = im.gauge;
    sol.g = insert_entry(g_red, im.gauge, 0.0);
    sol.residual = max_abs(im.q * sol.g - b);
    if (sol.residual > kSteinResidualTol * std::max(1.0, max_abs(b)))
        fail(ErrorCode::numeric,
             "Stein equation residual " + std::to_string(sol.residual) + " exceeds tolerance");
    return sol;
}

// Weights c with  sum_w c(w) g_h(w) = functional(g_h)  for every centered h,
// where g_h is this solver's solution.  Writing the functional as f'g and
// solving the transposed reduced system A' y = f' gives
//   functional(g_h) = y' hhat_reduced,
// and unpacking the centering hhat = h - <pi,h> yields weights
//   c = y - (sum y) pi,  with y(gauge) = 0.
// The weights sum to zero, so the sup over indicator h is half their l1 norm.
Eigen::VectorXd SteinSolver::functional_weights(
    const std::vector<std::pair<std::size_t, double>>& functional) const {
    const Impl& im = *impl_;
    const auto n = static_cast<std::size_t>(im.pi.p.size());
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    double abs_sum = 0.0;
    for (const auto& [state, coeff] : functional) {
        if (state >= n) fail(ErrorCode::invalid_argument, "functional references a state out of range");
        f[static_cast<Eigen::Index>(state)] += coeff;
        abs_sum += std::abs(coeff);
    }
    if (abs_sum == 0.0) fail(ErrorCode::invalid_argument, "empty functional");
    if (std::abs(f.sum()) > 1e-12 * abs_sum)
        fail(ErrorCode::invalid_argument,
             "functional coefficients must sum to zero (gauge invariance)");

    const Eigen::SparseLU<SpMat>& lut = im.transposed();  // also materializes im.at
    Eigen::VectorXd y_red = solve_refined(lut, *im.at, drop_entry(f, im.gauge));
    if (!y_red.allFinite()) fail(ErrorCode::numeric, "adjoint solve overflowed");
    Eigen::VectorXd y = insert_entry(y_red, im.gauge, 0.0);
    return y - y.sum() * im.pi.p;
}

SteinSolution solve_stein(const Generator& gen, const Eigen::VectorXd& rhs, const ProbVec* pi,
                          std::size_t gauge_state) {
    if (pi) return SteinSolver(gen, *pi, gauge_state).solve(rhs);
    return SteinSolver(gen, stationary(gen), gauge_state).solve(rhs);
}

}  // namespace steinlab

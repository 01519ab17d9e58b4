#pragma once
#include <cmath>
#include <utility>
#include <vector>

#include "generator.hpp"

namespace steinlab {

inline constexpr std::size_t kGthMaxStates = 2000;
inline constexpr double kStationaryTol = 1e-12;  // residual per unit of max exit rate
inline constexpr double kSteinResidualTol = 1e-9;

// Sentinel gauge choice: pin at the state carrying the most stationary mass.
// Pinning at a low-mass state makes the reduced system ill-conditioned (its
// inverse is built from hitting times of the pinned state), so this is the
// default everywhere a distribution is available.
inline constexpr std::size_t kGaugeAuto = static_cast<std::size_t>(-1);

// Stationary distribution. Subtraction-free GTH elimination up to kGthMaxStates
// (componentwise relative accuracy); above that, sparse LU on the transposed
// balance equations with one state pinned, plus one refinement pass.  The
// sparse path re-pins at the heaviest state and retries once when the first
// residual misses the tolerance.
ProbVec stationary(const Generator& gen);

// Dot product with Neumaier's compensated summation, for expectations whose
// terms cancel to far below the summand scale.  The carry is kept outside the
// running sum, so it survives even when the sum itself cancels to zero.
inline double compensated_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double term = a[i] * b[i];
    const double next = sum + term;
    carry += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
    sum = next;
  }
  return sum + carry;
}

// Uniformized power iteration; independent slow path kept for cross-checks.
ProbVec stationary_power_iteration(const Generator& gen, std::size_t max_iters = 2000000);

// Stationary law of a perturbed generator computed as base law plus correction.
// pi_base must be stationary for `base`, and `perturbed` must differ from `base`
// in a sparse set of rows. The correction solves y B = -pi0 U (U the rate
// difference) at its own scale, so results stay relatively accurate even when
// the perturbation only moves mass at scales far below one ulp of pi entries.
struct DifferenceResult {
  ProbVec pi;              // stationary law of `perturbed`
  Eigen::VectorXd delta;   // pi - pi_base, exact at its own scale
  double perturbed_rows;   // number of rows where the generators differ
};
DifferenceResult stationary_difference(const Generator& perturbed, const Generator& base,
                                       const ProbVec& pi_base);

// Solution of generator * g = rhs, gauge-fixed to g = 0 at `gauge_state`.
struct SteinSolution {
  SpacePtr space;
  Eigen::VectorXd g;
  std::size_t gauge_state = 0;
  double residual = 0.0;  // max |(A g - rhs)| over states
};

// Factors the gauge-reduced generator once; solves many right-hand sides.
// rhs must be centered against the generator's stationary law pi (the solve
// subtracts <pi, rhs> and errors when that inner product is not small).
class SteinSolver {
 public:
  SteinSolver(const Generator& gen, ProbVec pi, std::size_t gauge_state = kGaugeAuto);
  ~SteinSolver();
  SteinSolver(SteinSolver&&) noexcept;
  SteinSolver& operator=(SteinSolver&&) noexcept;

  SteinSolution solve(const Eigen::VectorXd& rhs) const;

  // Weight vector c of the linear functional h -> sum_i coeffs_i * g_{h}(state_i)
  // over solutions with centered h, i.e. functional(h) = c . h for every h.
  // Requires sum of coeffs zero (the functional must be gauge-invariant).
  Eigen::VectorXd functional_weights(
      const std::vector<std::pair<std::size_t, double>>& functional) const;

  const ProbVec& pi() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around SteinSolver.
SteinSolution solve_stein(const Generator& gen, const Eigen::VectorXd& rhs,
                          const ProbVec* pi = nullptr,
                          std::size_t gauge_state = kGaugeAuto);

}  // namespace steinlab

#pragma once
#include <Eigen/Sparse>
#include <functional>

#include "state_space.hpp"

namespace steinlab {

using SpMat = Eigen::SparseMatrix<double>;

// rate(state index, coordinate, direction in {-1,+1}) -> nonnegative jump rate
using RateRule = std::function<double(std::size_t, int, int)>;

// Conservative generator on an enumerated space. Row sums are zero; births that
// would leave the truncation are dropped and recorded per state so the caller
// can report the leak pi . dropped.
struct Generator {
  SpacePtr space;
  SpMat q;                      // column-major, includes the diagonal
  Eigen::VectorXd dropped;      // per-state rate lost to truncation
  double max_exit_rate = 0.0;
  bool irreducible = false;

  std::size_t size() const { return space->size(); }
};

Generator assemble(const SpacePtr& space, const RateRule& rule);

// Probability vector tied to its space.
struct ProbVec {
  SpacePtr space;
  Eigen::VectorXd p;

  double operator[](std::size_t i) const { return p[static_cast<Eigen::Index>(i)]; }
};

// pi-weighted total dropped rate.
double truncation_leak(const Generator& gen, const ProbVec& pi);

}  // namespace steinlab

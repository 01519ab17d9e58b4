#include "generator.hpp"

#include <sstream>
#include <vector>

namespace steinlab {

namespace {

// Strong connectivity of the positive-rate digraph: every state reachable from 0
// and 0 reachable from every state.
bool strongly_connected(const SpMat& q, std::size_t n) {
  if (n == 0) return false;
  std::vector<std::vector<std::uint32_t>> fwd(n), bwd(n);
  for (int c = 0; c < q.outerSize(); ++c)
    for (SpMat::InnerIterator it(q, c); it; ++it) {
      if (it.row() == it.col() || it.value() <= 0.0) continue;
      fwd[static_cast<std::size_t>(it.row())].push_back(static_cast<std::uint32_t>(it.col()));
      bwd[static_cast<std::size_t>(it.col())].push_back(static_cast<std::uint32_t>(it.row()));
    }
  auto full_reach = [&](const std::vector<std::vector<std::uint32_t>>& adj) {
    std::vector<char> seen(n, 0);
    std::vector<std::uint32_t> stack{0};
    seen[0] = 1;
    std::size_t cnt = 1;
    while (!stack.empty()) {
      std::uint32_t x = stack.back();
      stack.pop_back();
      for (std::uint32_t y : adj[x])
        if (!seen[y]) {
          seen[y] = 1;
          ++cnt;
          stack.push_back(y);
        }
    }
    return cnt == n;
  };
  return full_reach(fwd) && full_reach(bwd);
}

}  // namespace

Generator assemble(const SpacePtr& space, const RateRule& rule) {
  const std::size_t n = space->size();
  const int d = space->dim();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n * static_cast<std::size_t>(2 * d + 1));
  Eigen::VectorXd dropped = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  double max_exit = 0.0;

  for (std::size_t x = 0; x < n; ++x) {
    double exit = 0.0;
    for (int c = 0; c < d; ++c) {
      for (int dir : {+1, -1}) {
        double r = rule(x, c, dir);
        if (r == 0.0) continue;
        if (!(r > 0.0)) {
          std::ostringstream os;
          os << "negative or non-finite rate " << r << " at state " << x << ", coordinate " << c
             << ", direction " << dir;
          fail(ErrorCode::invalid_argument, os.str());
        }
        auto y = space->neighbor(x, c, dir);
        if (!y) {
          dropped[static_cast<Eigen::Index>(x)] += r;
          continue;
        }
        trips.emplace_back(static_cast<int>(x), static_cast<int>(*y), r);
        exit += r;
      }
    }
    trips.emplace_back(static_cast<int>(x), static_cast<int>(x), -exit);
    max_exit = std::max(max_exit, exit);
  }

  Generator g;
  g.space = space;
  g.q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  g.q.setFromTriplets(trips.begin(), trips.end());
  g.q.makeCompressed();
  g.dropped = std::move(dropped);
  g.max_exit_rate = max_exit;
  g.irreducible = strongly_connected(g.q, n);
  return g;
}

double truncation_leak(const Generator& gen, const ProbVec& pi) {
  if (!pi.space->same_shape(*gen.space)) fail(ErrorCode::invalid_argument, "leak: mismatched spaces");
  return pi.p.dot(gen.dropped);
}

}  // namespace steinlab

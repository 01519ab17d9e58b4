#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace steinlab {

inline constexpr std::size_t kDefaultMaxStates = 20000;

// Carrier of a finite point process: s_size "ordinary" locations plus the two
// distinguished locations a and b. The intensity puts mass 1/|lambda| on each of
// a and b and spreads the rest uniformly over the ordinary locations. The ground
// metric d0 has a and b at distance 1 from everything; inside the ordinary block
// it defaults to the discrete metric but can be overridden.
struct Carrier {
  int s_size = 1;
  double lambda_total = 0.0;
  Eigen::MatrixXd d0;  // (s_size+2) x (s_size+2)

  int num_points() const { return s_size + 2; }
  int a_index() const { return s_size; }
  int b_index() const { return s_size + 1; }
  std::vector<double> intensity() const;
  bool discrete_metric() const;

  static Carrier make(int s_size, double lambda_total);
  static Carrier make(int s_size, double lambda_total, const Eigen::MatrixXd& d0_s);
};

enum class SpaceKind { interval, box, configurations };

// Finite enumerated state space. States are nonnegative integer coordinate
// vectors listed in lexicographic order; moves are unit steps in one coordinate.
class StateSpace {
 public:
  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }

  std::span<const int> state(std::size_t idx) const {
    return {coords_.data() + idx * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::optional<std::size_t> find(std::span<const int> c) const;
  // Target of a unit move; nullopt when the move leaves the space.
  std::optional<std::size_t> neighbor(std::size_t idx, int coord, int delta) const;

  const std::vector<int>& bounds() const { return bound_; }  // per-coordinate max used for encoding
  int total_cap() const { return total_cap_; }               // <0 when no total-count constraint
  const Carrier* carrier() const { return carrier_ ? &*carrier_ : nullptr; }

  bool same_shape(const StateSpace& o) const;
  std::string describe() const;

  static std::shared_ptr<const StateSpace> interval(int n_max,
                                                    std::size_t max_states = kDefaultMaxStates);
  static std::shared_ptr<const StateSpace> box(std::vector<int> n_max,
                                               std::size_t max_states = kDefaultMaxStates);
  static std::shared_ptr<const StateSpace> configurations(const Carrier& carrier, int n_total_max,
                                                          int n_ab_max,
                                                          std::size_t max_states = kDefaultMaxStates);

 private:
  StateSpace() = default;
  std::uint64_t encode(std::span<const int> c) const;

  SpaceKind kind_ = SpaceKind::interval;
  int dim_ = 1;
  int total_cap_ = -1;
  std::vector<int> bound_;
  std::vector<int> coords_;  // size() * dim_, lexicographic
  std::vector<std::uint64_t> radix_;
  std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
  std::optional<Carrier> carrier_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

}  // namespace steinlab

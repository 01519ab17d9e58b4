#include "state_space.hpp"

#include <cmath>
#include <sstream>

namespace steinlab {

std::vector<double> Carrier::intensity() const {
  std::vector<double> lam(static_cast<std::size_t>(num_points()));
  double edge = 1.0 / lambda_total;
  double rest = (lambda_total - 2.0 * edge) / s_size;
  for (int i = 0; i < s_size; ++i) lam[static_cast<std::size_t>(i)] = rest;
  lam[static_cast<std::size_t>(a_index())] = edge;
  lam[static_cast<std::size_t>(b_index())] = edge;
  return lam;
}

bool Carrier::discrete_metric() const {
  int n = num_points();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double want = (i == j) ? 0.0 : 1.0;
      if (d0(i, j) != want) return false;
    }
  return true;
}

Carrier Carrier::make(int s_size, double lambda_total) {
  int n = s_size + 2;
  Eigen::MatrixXd d0 = Eigen::MatrixXd::Ones(n, n);
  d0.diagonal().setZero();
  Carrier c;
  c.s_size = s_size;
  c.lambda_total = lambda_total;
  c.d0 = d0;
  if (s_size < 1) fail(ErrorCode::invalid_argument, "carrier needs at least one ordinary location");
  if (!(lambda_total > std::sqrt(2.0)))
    fail(ErrorCode::invalid_argument, "carrier intensity must exceed sqrt(2) so the ordinary block keeps positive mass");
  return c;
}

Carrier Carrier::make(int s_size, double lambda_total, const Eigen::MatrixXd& d0_s) {
  Carrier c = make(s_size, lambda_total);
  if (d0_s.rows() != s_size || d0_s.cols() != s_size)
    fail(ErrorCode::invalid_argument, "ground-metric block has wrong dimensions");
  for (int i = 0; i < s_size; ++i)
    for (int j = 0; j < s_size; ++j) {
      double v = d0_s(i, j);
      if (v < 0.0 || v > 1.0 || (i == j && v != 0.0) || d0_s(j, i) != v)
        fail(ErrorCode::invalid_argument, "ground metric must be symmetric with zero diagonal and values in [0,1]");
      c.d0(i, j) = v;
    }
  return c;
}

std::uint64_t StateSpace::encode(std::span<const int> c) const {
  std::uint64_t key = 0;
  for (int i = 0; i < dim_; ++i) key += radix_[static_cast<std::size_t>(i)] * static_cast<std::uint64_t>(c[static_cast<std::size_t>(i)]);
  return key;
}

std::optional<std::size_t> StateSpace::find(std::span<const int> c) const {
  if (static_cast<int>(c.size()) != dim_) return std::nullopt;
  long total = 0;
  for (int i = 0; i < dim_; ++i) {
    int v = c[static_cast<std::size_t>(i)];
    if (v < 0 || v > bound_[static_cast<std::size_t>(i)]) return std::nullopt;
    total += v;
  }
  if (total_cap_ >= 0 && total > total_cap_) return std::nullopt;
  if (kind_ != SpaceKind::configurations) {
    // dense mixed-radix layout: the key is the index
    return static_cast<std::size_t>(encode(c));
  }
  auto it = lookup_.find(encode(c));
  if (it == lookup_.end()) return std::nullopt;
  return static_cast<std::size_t>(it->second);
}

std::optional<std::size_t> StateSpace::neighbor(std::size_t idx, int coord, int delta) const {
  if (coord < 0 || coord >= dim_ || (delta != 1 && delta != -1))
    fail(ErrorCode::invalid_argument, "neighbor: bad move");
  auto s = state(idx);
  std::vector<int> c(s.begin(), s.end());
  c[static_cast<std::size_t>(coord)] += delta;
  return find(c);
}

bool StateSpace::same_shape(const StateSpace& o) const {
  return kind_ == o.kind_ && dim_ == o.dim_ && bound_ == o.bound_ && total_cap_ == o.total_cap_;
}

std::string StateSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::interval:
      os << "interval[0.." << bound_[0] << "]";
      break;
    case SpaceKind::box:
      os << "box[";
      for (int i = 0; i < dim_; ++i) os << (i ? "," : "") << bound_[static_cast<std::size_t>(i)];
      os << "]";
      break;
    case SpaceKind::configurations:
      os << "configurations[points=" << dim_ << ",total<=" << total_cap_
         << ",ab<=" << bound_[static_cast<std::size_t>(dim_ - 1)] << "]";
      break;
  }
  os << " (" << size() << " states)";
  return os.str();
}

namespace {

void check_capacity(std::size_t n, std::size_t max_states, const char* what) {
  if (n > max_states) {
    std::ostringstream os;
    os << what << " would enumerate " << n << " states, over the cap of " << max_states
       << " (raise STEIN_LAB_MAX_STATES or shrink the truncation)";
    fail(ErrorCode::capacity, os.str());
  }
}

}  // namespace

SpacePtr StateSpace::interval(int n_max, std::size_t max_states) {
  if (n_max < 1) fail(ErrorCode::invalid_argument, "interval space needs n_max >= 1");
  check_capacity(static_cast<std::size_t>(n_max) + 1, max_states, "interval space");
  auto sp = std::shared_ptr<StateSpace>(new StateSpace());
  sp->kind_ = SpaceKind::interval;
  sp->dim_ = 1;
  sp->bound_ = {n_max};
  sp->radix_ = {1};
  sp->coords_.resize(static_cast<std::size_t>(n_max) + 1);
  for (int j = 0; j <= n_max; ++j) sp->coords_[static_cast<std::size_t>(j)] = j;
  return sp;
}

SpacePtr StateSpace::box(std::vector<int> n_max, std::size_t max_states) {
  int d = static_cast<int>(n_max.size());
  if (d < 1) fail(ErrorCode::invalid_argument, "box space needs at least one coordinate");
  std::size_t n = 1;
  for (int b : n_max) {
    if (b < 1) fail(ErrorCode::invalid_argument, "box space needs n_max >= 1 in every coordinate");
    n *= static_cast<std::size_t>(b) + 1;
    check_capacity(n, max_states, "box space");
  }

  auto sp = std::shared_ptr<StateSpace>(new StateSpace());
  sp->kind_ = SpaceKind::box;
  sp->dim_ = d;
  sp->bound_ = std::move(n_max);
  sp->radix_.assign(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i)
    sp->radix_[static_cast<std::size_t>(i)] =
        sp->radix_[static_cast<std::size_t>(i + 1)] * static_cast<std::uint64_t>(sp->bound_[static_cast<std::size_t>(i + 1)] + 1);
  sp->coords_.reserve(n * static_cast<std::size_t>(d));
  std::vector<int> c(static_cast<std::size_t>(d), 0);
  while (true) {
    sp->coords_.insert(sp->coords_.end(), c.begin(), c.end());
    int i = d - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == sp->bound_[static_cast<std::size_t>(i)]) {
      c[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
  }
  return sp;
}

SpacePtr StateSpace::configurations(const Carrier& carrier, int n_total_max, int n_ab_max,
                                    std::size_t max_states) {
  if (n_total_max < 2) fail(ErrorCode::invalid_argument, "configuration space needs n_total_max >= 2");
  if (n_ab_max < 1) fail(ErrorCode::invalid_argument, "configuration space needs n_ab_max >= 1");
  int d = carrier.num_points();
  auto sp = std::shared_ptr<StateSpace>(new StateSpace());
  sp->kind_ = SpaceKind::configurations;
  sp->dim_ = d;
  sp->total_cap_ = n_total_max;
  sp->carrier_ = carrier;
  sp->bound_.assign(static_cast<std::size_t>(d), n_total_max);
  int cap_ab = std::min(n_ab_max, n_total_max);
  sp->bound_[static_cast<std::size_t>(carrier.a_index())] = cap_ab;
  sp->bound_[static_cast<std::size_t>(carrier.b_index())] = cap_ab;
  sp->radix_.assign(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i)
    sp->radix_[static_cast<std::size_t>(i)] =
        sp->radix_[static_cast<std::size_t>(i + 1)] * static_cast<std::uint64_t>(sp->bound_[static_cast<std::size_t>(i + 1)] + 1);

  std::vector<int> c(static_cast<std::size_t>(d), 0);
  int total = 0;
  std::size_t count = 0;
  while (true) {
    sp->coords_.insert(sp->coords_.end(), c.begin(), c.end());
    sp->lookup_.emplace(sp->encode(c), static_cast<std::uint32_t>(count));
    ++count;
    check_capacity(count, max_states, "configuration space");
    // odometer step respecting the per-coordinate bounds and the total cap
    int i = d - 1;
    while (i >= 0) {
      if (c[static_cast<std::size_t>(i)] < sp->bound_[static_cast<std::size_t>(i)] && total < n_total_max) {
        ++c[static_cast<std::size_t>(i)];
        ++total;
        break;
      }
      total -= c[static_cast<std::size_t>(i)];
      c[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  return sp;
}

}  // namespace steinlab

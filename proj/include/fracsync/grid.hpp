#pragma once

#include <cstddef>
#include <cstdint>

namespace fracsync {

/// Uniform time grid that always contains t = 0.
///
/// Nodes are `i * dt` for integer `i` in `[first, last]` with
/// `first <= 0 <= last`. Array index `k` maps to `i = first + k`.
class Grid {
 public:
  Grid(double dt, std::int64_t first, std::int64_t last);

  /// Past grid `[-steps * dt, 0]`.
  static Grid past(double dt, std::int64_t steps);
  /// Future grid `[0, steps * dt]`.
  static Grid future(double dt, std::int64_t steps);
  /// Grid over `[t_min, t_max]`; both ends must be multiples of `dt`.
  static Grid span(double dt, double t_min, double t_max);

  double dt() const noexcept { return dt_; }
  std::int64_t first() const noexcept { return first_; }
  std::int64_t last() const noexcept { return last_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(last_ - first_ + 1); }
  double t_min() const noexcept { return static_cast<double>(first_) * dt_; }
  double t_max() const noexcept { return static_cast<double>(last_) * dt_; }

  /// Array index of the node at t = 0.
  std::size_t zero_index() const noexcept { return static_cast<std::size_t>(-first_); }
  /// Time of the node at array index `k`.
  double time(std::size_t k) const noexcept {
    return static_cast<double>(first_ + static_cast<std::int64_t>(k)) * dt_;
  }
  bool contains_step(std::int64_t i) const noexcept { return i >= first_ && i <= last_; }
  /// Array index of the grid node `i * dt`.
  std::size_t index_of_step(std::int64_t i) const;

  /// Number of steps represented by `t`; throws unless `t` is a multiple of dt.
  std::int64_t steps_for(double t) const;

  bool operator==(const Grid& other) const noexcept = default;

 private:
  double dt_;
  std::int64_t first_;
  std::int64_t last_;
};

/// Exact step count of `t` on a `dt` lattice, or ContractViolation.
std::int64_t grid_steps(double t, double dt);

}  // namespace fracsync

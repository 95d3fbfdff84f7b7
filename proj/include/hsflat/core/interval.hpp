#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsflat {

/// Closed interval [lo, hi] standing in for a set value of a multi-valued
/// function. The empty set is encoded as lo = +inf, hi = -inf.
struct Interval {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  static constexpr Interval point(double v) noexcept { return {v, v}; }
  static constexpr Interval hull(double a, double b) noexcept {
    return a <= b ? Interval{a, b} : Interval{b, a};
  }
  static constexpr Interval empty_set() noexcept { return {}; }

  [[nodiscard]] constexpr bool empty() const noexcept { return !(lo <= hi); }
  [[nodiscard]] constexpr bool singleton() const noexcept { return lo == hi; }
  [[nodiscard]] constexpr double width() const noexcept { return hi - lo; }
  [[nodiscard]] constexpr double mid() const noexcept { return 0.5 * (lo + hi); }

  /// Largest |s| over the set.
  [[nodiscard]] double abs_max() const noexcept {
    return std::max(std::abs(lo), std::abs(hi));
  }

  void include(double v) noexcept {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// Minkowski arithmetic. Any empty operand yields the empty set.

constexpr Interval operator+(const Interval& a, const Interval& b) noexcept {
  if (a.empty() || b.empty()) return Interval::empty_set();
  return {a.lo + b.lo, a.hi + b.hi};
}

constexpr Interval operator-(const Interval& a, const Interval& b) noexcept {
  if (a.empty() || b.empty()) return Interval::empty_set();
  return {a.lo - b.hi, a.hi - b.lo};
}

constexpr Interval operator*(double c, const Interval& a) noexcept {
  if (a.empty()) return a;
  return c >= 0.0 ? Interval{c * a.lo, c * a.hi} : Interval{c * a.hi, c * a.lo};
}

constexpr Interval operator-(const Interval& a) noexcept { return -1.0 * a; }

/// Smallest M with a - b contained in [-M, M] (set-difference semantics).
inline double spread(const Interval& a, const Interval& b) noexcept {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(std::abs(a.hi - b.lo), std::abs(b.hi - a.lo));
}

} // namespace hsflat

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hsflat/core/error.hpp"
#include "hsflat/core/grid.hpp"
#include "hsflat/core/interval.hpp"

namespace hsflat {

/// A point of the closed half space times (-inf, 0]: horizontal coordinate,
/// height above the boundary, time.
struct ParabolicPoint {
  double x = 0.0;
  double xn = 0.0;
  double t = 0.0;

  friend bool operator==(const ParabolicPoint&, const ParabolicPoint&) = default;
};

/// Interval-valued samples on a lattice (x' periodic) x (x_n levels) x (times).
///
/// Storage order is time-major, then level, then x'. Horizontal node j sits at
/// x' = x_offset + j*h_x; a nonzero offset appears after odd-step differences.
class MultiValuedSample {
public:
  MultiValuedSample() = default;
  MultiValuedSample(PeriodicGrid1D grid, std::vector<double> levels, std::vector<double> times,
                    double x_offset = 0.0)
      : grid_(grid), levels_(std::move(levels)), times_(std::move(times)), x_offset_(x_offset),
        values_(static_cast<std::size_t>(grid_.size()) * levels_.size() * times_.size()) {
    detail::require(!levels_.empty() && !times_.empty(),
                    "MultiValuedSample: need at least one level and one time");
    for (double l : levels_) detail::require(l >= 0.0, "MultiValuedSample: levels must be >= 0");
  }

  /// Boundary trace: a single level x_n = 0.
  static MultiValuedSample trace(PeriodicGrid1D grid, std::vector<double> times) {
    return MultiValuedSample(grid, {0.0}, std::move(times));
  }

  [[nodiscard]] const PeriodicGrid1D& grid() const noexcept { return grid_; }
  [[nodiscard]] int nx() const noexcept { return grid_.size(); }
  [[nodiscard]] int nlevels() const noexcept { return static_cast<int>(levels_.size()); }
  [[nodiscard]] int ntimes() const noexcept { return static_cast<int>(times_.size()); }
  [[nodiscard]] const std::vector<double>& levels() const noexcept { return levels_; }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] double x_offset() const noexcept { return x_offset_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  [[nodiscard]] std::size_t index(int it, int il, int ix) const noexcept {
    return (static_cast<std::size_t>(it) * levels_.size() + il) * grid_.size() + ix;
  }
  [[nodiscard]] Interval& at(int it, int il, int ix) noexcept { return values_[index(it, il, ix)]; }
  [[nodiscard]] const Interval& at(int it, int il, int ix) const noexcept {
    return values_[index(it, il, ix)];
  }
  [[nodiscard]] Interval& operator[](std::size_t k) noexcept { return values_[k]; }
  [[nodiscard]] const Interval& operator[](std::size_t k) const noexcept { return values_[k]; }
  [[nodiscard]] std::span<const Interval> values() const noexcept { return values_; }
  [[nodiscard]] std::span<Interval> values() noexcept { return values_; }

  [[nodiscard]] double x_at(int ix) const noexcept { return x_offset_ + grid_.x(ix); }

  [[nodiscard]] ParabolicPoint point(std::size_t k) const noexcept {
    const std::size_t nx_ = grid_.size();
    const std::size_t per_t = nx_ * levels_.size();
    const auto it = k / per_t;
    const auto il = (k % per_t) / nx_;
    const auto ix = k % nx_;
    return {x_at(static_cast<int>(ix)), levels_[il], times_[it]};
  }

  /// Sets every node of time slice it / level il from single values.
  void set_row(int it, int il, std::span<const double> row) {
    detail::require(row.size() == static_cast<std::size_t>(nx()), "set_row: size mismatch");
    for (int ix = 0; ix < nx(); ++ix) at(it, il, ix) = Interval::point(row[ix]);
  }

  [[nodiscard]] std::vector<double> row_mid(int it, int il) const {
    std::vector<double> out(nx());
    for (int ix = 0; ix < nx(); ++ix) out[ix] = at(it, il, ix).mid();
    return out;
  }

  [[nodiscard]] bool same_lattice(const MultiValuedSample& o) const noexcept {
    return grid_ == o.grid_ && levels_ == o.levels_ && times_ == o.times_ &&
           x_offset_ == o.x_offset_;
  }

private:
  PeriodicGrid1D grid_{};
  std::vector<double> levels_{0.0};
  std::vector<double> times_{0.0};
  double x_offset_ = 0.0;
  std::vector<Interval> values_;
};

/// A subset of lattice nodes, with a human-readable description for reports.
struct Region {
  std::vector<std::size_t> nodes;
  std::string description;
};

inline Region region_all(const MultiValuedSample& v) {
  Region r{{}, "all"};
  r.nodes.resize(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) r.nodes[k] = k;
  return r;
}

/// Closed parabolic cylinder {|x'-xc| <= r, t-r <= s <= t, x_n <= r} on the lattice.
/// A relative slack of 1e-9 rounds boundary nodes outward.
inline Region region_cylinder(const MultiValuedSample& v, double xc, double t_top, double radius,
                              std::string description = "cylinder") {
  Region out{{}, std::move(description)};
  const double slack = 1e-9 * std::max(1.0, radius);
  for (int it = 0; it < v.ntimes(); ++it) {
    const double s = v.times()[it];
    if (s > t_top + slack || s < t_top - radius - slack) continue;
    for (int il = 0; il < v.nlevels(); ++il) {
      if (v.levels()[il] > radius + slack) continue;
      for (int ix = 0; ix < v.nx(); ++ix) {
        if (std::abs(v.grid().displacement(xc, v.x_at(ix))) <= radius + slack)
          out.nodes.push_back(v.index(it, il, ix));
      }
    }
  }
  return out;
}

/// Restricts a region to nodes of a time window [t0, t1].
inline Region region_time_window(const MultiValuedSample& v, const Region& base, double t0,
                                 double t1) {
  Region out{{}, base.description + " in [" + std::to_string(t0) + "," + std::to_string(t1) + "]"};
  for (auto k : base.nodes) {
    const double t = v.point(k).t;
    if (t >= t0 - 1e-12 && t <= t1 + 1e-12) out.nodes.push_back(k);
  }
  return out;
}

/// Oscillation over a region with interval semantics; +inf on any empty value.
inline double oscillation(const MultiValuedSample& v, const Region& region) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (auto k : region.nodes) {
    const Interval& s = v[k];
    if (s.empty()) return std::numeric_limits<double>::infinity();
    lo = std::min(lo, s.lo);
    hi = std::max(hi, s.hi);
  }
  return region.nodes.empty() ? 0.0 : hi - lo;
}

inline double linf_norm(const MultiValuedSample& v, const Region& region) {
  double m = 0.0;
  for (auto k : region.nodes) {
    const Interval& s = v[k];
    if (s.empty()) return std::numeric_limits<double>::infinity();
    m = std::max(m, s.abs_max());
  }
  return m;
}

inline double oscillation(const MultiValuedSample& v) { return oscillation(v, region_all(v)); }
inline double linf_norm(const MultiValuedSample& v) { return linf_norm(v, region_all(v)); }

/// Lattice multiple m with h = m*h_x, or an error explaining how to fix h.
inline int lattice_multiple(const PeriodicGrid1D& grid, double h) {
  const double hx = grid.spacing();
  const double m = std::round(h / hx);
  if (!(h > 0.0) || m < 1.0 || std::abs(m * hx - h) > 1e-9 * hx) {
    const double nearest = std::max(1.0, m);
    throw InvalidArgument("diff_quotient: step h = " + std::to_string(h) +
                          " is not a positive multiple of the lattice spacing h_x = " +
                          std::to_string(hx) + "; use h = m*h_x, e.g. m = " +
                          std::to_string(static_cast<long>(nearest)) +
                          " (h = " + std::to_string(nearest * hx) + ")");
  }
  return static_cast<int>(m);
}

/// Centered difference quotient (v(x + (h/2)e) - v(x - (h/2)e)) / h^beta along x'
/// with e = +1 or -1 and periodic wrap. h must be a lattice multiple of h_x;
/// for odd multiples the output lattice is staggered by h_x/2.
inline MultiValuedSample diff_quotient(const MultiValuedSample& v, double h, int e, double beta) {
  detail::require(e == 1 || e == -1, "diff_quotient: direction must be +1 or -1");
  detail::require(beta >= 0.0 && beta <= 1.0, "diff_quotient: beta must lie in [0,1]");
  const int m = lattice_multiple(v.grid(), h);
  const double hx = v.grid().spacing();

  // Output node j sits at x_offset + j*hx + (m odd ? hx/2 : 0).
  double offset = v.x_offset() + ((m % 2) ? 0.5 * hx : 0.0);
  int shift = 0;
  if (offset >= hx - 1e-12 * hx) {
    offset -= hx;
    shift = 1;
  }
  const int plus = (m + 1) / 2 + shift;  // index offset of x + h/2
  const int minus = m / 2 - shift;        // index offset of x - h/2 (subtracted)
  const double scale = 1.0 / std::pow(h, beta);

  MultiValuedSample out(v.grid(), v.levels(), v.times(), offset);
  for (int it = 0; it < v.ntimes(); ++it)
    for (int il = 0; il < v.nlevels(); ++il)
      for (int ix = 0; ix < v.nx(); ++ix) {
        const Interval& a = v.at(it, il, v.grid().wrap(ix + plus));
        const Interval& b = v.at(it, il, v.grid().wrap(ix - minus));
        const Interval d = e == 1 ? a - b : b - a;
        out.at(it, il, ix) = scale * d;
      }
  return out;
}

} // namespace hsflat

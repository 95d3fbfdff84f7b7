#pragma once

#include <array>
#include <cmath>

#include "hsflat/core/multivalued.hpp"

namespace hsflat {

namespace detail {

// Length of the path p -> (z,0,t) -> (w,0,s) -> q with p at horizontal 0 and q at D.
inline double waypoint_length(double z, double w, double a, double b, double D, double dt) {
  return std::hypot(z, a) + std::hypot(z - w, dt) + std::hypot(w - D, b);
}

} // namespace detail

/// Parabolic distance joining the spatial slices through the boundary x_n = 0.
/// Horizontal coordinates are taken as given (no periodic wrap).
inline double metric_d(const ParabolicPoint& p, const ParabolicPoint& q) {
  const double dx = q.x - p.x;
  if (p.t == q.t) return std::hypot(dx, q.xn - p.xn);
  const double dt = q.t - p.t;
  if (p.xn == 0.0 && q.xn == 0.0) return std::hypot(dx, dt);

  // The objective is convex in (z, w) and its minimizer lies in [0, D]^2.
  const double D = std::abs(dx);
  const double a = p.xn, b = q.xn;
  constexpr int kGrid = 64;
  double bz = 0.0, bw = 0.0;
  double best = detail::waypoint_length(0.0, 0.0, a, b, D, dt);
  for (int i = 0; i <= kGrid; ++i)
    for (int j = 0; j <= kGrid; ++j) {
      const double z = D * i / kGrid, w = D * j / kGrid;
      const double f = detail::waypoint_length(z, w, a, b, D, dt);
      if (f < best) {
        best = f;
        bz = z;
        bw = w;
      }
    }

  double step = D > 0.0 ? D / kGrid : 0.0;
  const double stop = 1e-13 * std::max({1.0, D, a, b, std::abs(dt)});
  static constexpr std::array<std::array<double, 2>, 8> dirs{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
  while (step > stop) {
    bool moved = false;
    for (const auto& d : dirs) {
      const double z = bz + step * d[0], w = bw + step * d[1];
      const double f = detail::waypoint_length(z, w, a, b, D, dt);
      if (f < best) {
        best = f;
        bz = z;
        bw = w;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

/// Same as metric_d with the horizontal separation measured on the torus of the grid.
inline double metric_d_periodic(const PeriodicGrid1D& g, const ParabolicPoint& p,
                                const ParabolicPoint& q) {
  ParabolicPoint qq = q;
  qq.x = p.x + g.displacement(p.x, q.x);
  return metric_d(p, qq);
}

} // namespace hsflat

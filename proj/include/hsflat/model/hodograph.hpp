#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hsflat/core/multivalued.hpp"
#include "hsflat/model/hele_shaw.hpp"

namespace hsflat {

/// Simulator time to the analysis frame, where the last snapshot sits at t = 0.
inline double normalized_time(double t_sim, double t_end) { return t_sim - t_end; }

/// Boundary values of the hodograph on the (x', t) lattice of a trajectory.
/// Times are stored in the analysis frame; sim_times keeps the originals.
struct HodographTrace {
  MultiValuedSample values;
  double eps = 0.0;
  double gamma0 = 0.0;
  Schedule a;
  std::vector<double> sim_times;
  std::vector<double> A;
  double N = 1.0;  // sup |u_bar| + 1
};

/// u_bar(x', 0, t) = (gamma0 + A(t) - gamma(x', t)) / eps.
inline HodographTrace trace_from_interface(const Trajectory& traj, double eps) {
  detail::require(eps > 0.0, "trace_from_interface: eps must be positive");
  detail::require(!traj.snapshots.empty(), "trace_from_interface: empty trajectory");
  const double t_end = traj.snapshots.back().t;
  std::vector<double> times;
  HodographTrace tr;
  for (const auto& s : traj.snapshots) {
    times.push_back(normalized_time(s.t, t_end));
    tr.sim_times.push_back(s.t);
    tr.A.push_back(s.A);
  }
  tr.values = MultiValuedSample::trace(traj.grid.horizontal(), times);
  tr.eps = eps;
  tr.gamma0 = traj.gamma0;
  tr.a = traj.a;
  for (int it = 0; it < tr.values.ntimes(); ++it) {
    const auto& s = traj.snapshots[it];
    for (int ix = 0; ix < tr.values.nx(); ++ix)
      tr.values.at(it, 0, ix) = Interval::point((traj.gamma0 + s.A - s.gamma[ix]) / eps);
  }
  tr.N = linf_norm(tr.values) + 1.0;
  return tr;
}

namespace detail {

// Monotone cubic Hermite slopes (Fritsch-Carlson) for samples f over increasing z.
inline std::vector<double> pchip_slopes(const std::vector<double>& z, const std::vector<double>& f) {
  const std::size_t n = z.size();
  std::vector<double> del(n - 1), m(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) del[j] = (f[j + 1] - f[j]) / (z[j + 1] - z[j]);
  m[0] = del[0];
  m[n - 1] = del[n - 2];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (del[j - 1] * del[j] <= 0.0) continue;
    const double h0 = z[j] - z[j - 1], h1 = z[j + 1] - z[j];
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    m[j] = (w1 + w2) / (w1 / del[j - 1] + w2 / del[j]);
  }
  return m;
}

inline double hermite(double z0, double z1, double f0, double f1, double m0, double m1, double z) {
  const double h = z1 - z0, s = (z - z0) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * f1 +
         (s3 - s2) * h * m1;
}

// Root of the Hermite piece minus target on [z0, z1], assuming a sign change; bisection to 1e-12.
inline double hermite_root(double z0, double z1, double f0, double f1, double m0, double m1,
                           double target) {
  double lo = z0, hi = z1;
  double flo = f0 - target;
  if (flo == 0.0) return z0;
  if (f1 - target == 0.0) return z1;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double fm = hermite(z0, z1, f0, f1, m0, m1, mid) - target;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace detail

/// Interior hodograph of one pressure field: for depth level y >= 0 below the reference
/// front F = gamma0 + A, solve u(x', F - y - eps*s) = y for s. Vertically monotone
/// columns give a single root; otherwise all roots are collected into their hull.
/// Levels with no root inside the strip are empty.
inline MultiValuedSample interior_hodograph(const ScalarField2D& u, const InterfaceState& s,
                                            double eps, const std::vector<double>& levels,
                                            double t_normalized = 0.0) {
  detail::require(eps > 0.0, "interior_hodograph: eps must be positive");
  const auto& g = u.grid;
  const int nx = g.nx(), ny = g.ny();
  const double F = s.gamma0 + s.A;
  MultiValuedSample out(g.horizontal(), levels, {t_normalized});
  std::vector<double> z(ny), f(ny);
  for (int i = 0; i < nx; ++i) {
    const double D = u.gamma[i] + u.H;
    bool monotone = true;
    for (int j = 0; j < ny; ++j) {
      z[j] = -u.H + g.y(j) * D;
      f[j] = u.at(i, j);
      if (j && !(f[j] < f[j - 1])) monotone = false;
    }
    const auto m = detail::pchip_slopes(z, f);
    for (int il = 0; il < static_cast<int>(levels.size()); ++il) {
      const double y = levels[il];
      Interval roots = Interval::empty_set();
      for (int j = 0; j + 1 < ny; ++j) {
        const double a0 = f[j] - y, a1 = f[j + 1] - y;
        if (a0 * a1 > 0.0) continue;
        const double zr = detail::hermite_root(z[j], z[j + 1], f[j], f[j + 1], m[j], m[j + 1], y);
        roots.include((F - y - zr) / eps);
        if (monotone) break;
      }
      out.at(0, il, i) = roots;
    }
  }
  return out;
}

/// Both sides of the boundary relation in the trace convention,
/// u_t = [a(1 + eps u_n) - 1 - eps^2 |Du|^2] / (eps (1 + eps u_n)),
/// with the linear and quadratic parts logged separately.
struct BoundaryRelationReport {
  std::vector<double> times;        // analysis-frame times of interior snapshots
  std::vector<std::vector<double>> residual;
  double max_residual = 0.0;
  double max_linear = 0.0;
  double max_quadratic = 0.0;
  double max_dt_ubar = 0.0;
};

/// dn_ubar[it][ix] holds d u_bar / d(depth) at the boundary for every trace time.
/// Time derivatives use centered differences, so the first and last slices are skipped.
inline BoundaryRelationReport boundary_relation_residual(
    const HodographTrace& tr, const std::vector<std::vector<double>>& dn_ubar) {
  const auto& v = tr.values;
  detail::require(static_cast<int>(dn_ubar.size()) == v.ntimes(),
                  "boundary_relation_residual: need one normal-derivative row per time");
  detail::require(v.ntimes() >= 3, "boundary_relation_residual: need >= 3 times");
  const auto& g = v.grid();
  const double eps = tr.eps;
  BoundaryRelationReport rep;
  for (int it = 1; it + 1 < v.ntimes(); ++it) {
    const double dt = tr.sim_times[it + 1] - tr.sim_times[it - 1];
    const double a = tr.a(tr.sim_times[it]);
    std::vector<double> res(v.nx());
    for (int ix = 0; ix < v.nx(); ++ix) {
      const double ut = (v.at(it + 1, 0, ix).mid() - v.at(it - 1, 0, ix).mid()) / dt;
      const double ux = (v.at(it, 0, g.wrap(ix + 1)).mid() - v.at(it, 0, g.wrap(ix - 1)).mid()) /
                        (2.0 * g.spacing());
      const double un = dn_ubar[it][ix];
      const double den = 1.0 + eps * un;
      const double lin = (a * den - 1.0) / (eps * den);
      const double quad = eps * ux * ux / den;
      res[ix] = ut - (lin - quad);
      rep.max_residual = std::max(rep.max_residual, std::abs(res[ix]));
      rep.max_linear = std::max(rep.max_linear, std::abs(lin));
      rep.max_quadratic = std::max(rep.max_quadratic, std::abs(quad));
      rep.max_dt_ubar = std::max(rep.max_dt_ubar, std::abs(ut));
    }
    rep.times.push_back(v.times()[it]);
    rep.residual.push_back(std::move(res));
  }
  return rep;
}

/// One-sided second-order depth derivative of u_bar at the boundary from levels {0, h, 2h}.
inline std::vector<double> boundary_normal_derivative(const MultiValuedSample& field) {
  detail::require(field.nlevels() >= 3, "boundary_normal_derivative: need levels 0, h, 2h");
  const auto& l = field.levels();
  const double h = l[1] - l[0];
  detail::require(l[0] == 0.0 && std::abs(l[2] - l[1] - h) < 1e-12 * std::max(1.0, h),
                  "boundary_normal_derivative: levels must be 0, h, 2h");
  std::vector<double> d(field.nx());
  for (int ix = 0; ix < field.nx(); ++ix)
    d[ix] = (-3.0 * field.at(0, 0, ix).mid() + 4.0 * field.at(0, 1, ix).mid() -
             field.at(0, 2, ix).mid()) / (2.0 * h);
  return d;
}

/// Pressure and interior hodograph of a stored snapshot.
inline MultiValuedSample snapshot_interior(const Trajectory& traj, std::size_t index, double eps,
                                           const std::vector<double>& levels,
                                           PressureSolver& solver) {
  const auto& snap = traj.snapshots.at(index);
  InterfaceState s{traj.grid, snap.gamma, snap.t, traj.H, traj.a, snap.A, traj.gamma0};
  const auto u = solve_pressure(s, solver);
  return interior_hodograph(u, s, eps, levels, normalized_time(snap.t, traj.snapshots.back().t));
}

} // namespace hsflat

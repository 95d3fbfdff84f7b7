#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hsflat/core/multivalued.hpp"

namespace hsflat {

struct ConvolutionParams {
  double xi = 0.25;
  double tau = 0.04;
  double N = 2.0;
  double eps = 0.05;
};

struct DualPointRecord {
  ParabolicPoint base;
  double dx = 0.0;  // y'_0
  double ds = 0.0;  // s_0
  double value = 0.0;
};

/// Convolution of a boundary trace; out covers the time slices whose whole temporal
/// window lies inside the trace (first_time .. first_time + out.ntimes() - 1).
struct ConvolutionResult {
  MultiValuedSample out;
  std::vector<DualPointRecord> duals;  // one per output node, storage order
  int first_time = 0;
  int window_x = 0;  // lattice half-widths of the open windows
  int window_t = 0;
  std::string note;
};

namespace detail {

inline int open_halfwidth(double radius, double h) {
  // Largest m with m*h < radius.
  int m = static_cast<int>(std::ceil(radius / h - 1e-12)) - 1;
  return std::max(m, 0);
}

inline void check_params(const ConvolutionParams& p) {
  require(p.xi > 0.0 && p.tau > 0.0, "convolution: xi and tau must be positive");
  require(p.eps * p.N > 0.0 && p.eps * p.N < 1.0, "convolution: need eps*N in (0,1)");
}

// sign = +1: sup with -penalty; sign = -1: inf with +penalty.
inline ConvolutionResult convolve(const MultiValuedSample& v, const ConvolutionParams& p,
                                  int sign, std::span<const double> drift) {
  check_params(p);
  require(v.nlevels() == 1, "convolution: expects a boundary trace (one level)");
  const auto& g = v.grid();
  const auto& times = v.times();
  const int nt = v.ntimes();
  require(drift.empty() || drift.size() == static_cast<std::size_t>(nt),
          "convolution: drift needs one value per time");
  double dt = nt > 1 ? times[1] - times[0] : 1.0;
  for (int it = 1; it < nt; ++it)
    require(std::abs(times[it] - times[it - 1] - dt) < 1e-9 * std::max(1.0, std::abs(dt)),
            "convolution: trace times must be uniform");
  ConvolutionResult r;
  r.window_x = open_halfwidth(std::sqrt(p.xi), g.spacing());
  r.window_t = nt > 1 ? open_halfwidth(std::sqrt(p.tau), dt) : 0;
  require(2 * r.window_x + 1 <= g.size(), "convolution: spatial window wraps the whole period");
  const int t0 = r.window_t, t1 = nt - 1 - r.window_t;
  if (t1 < t0) throw InvalidArgument("convolution: temporal window exceeds the trace");
  if (r.window_t > 0)
    r.note = "output region shrunk by " + std::to_string(r.window_t) + " slices at each end";
  r.first_time = t0;
  std::vector<double> out_times(times.begin() + t0, times.begin() + t1 + 1);
  r.out = MultiValuedSample(g, v.levels(), out_times, v.x_offset());
  auto d = [&](int it) { return drift.empty() ? 0.0 : drift[it]; };

  for (int it = t0; it <= t1; ++it)
    for (int ix = 0; ix < g.size(); ++ix) {
      double best = sign > 0 ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
      int bx = 0, bs = 0;
      for (int s = -r.window_t; s <= r.window_t; ++s) {
        const double ds = s * dt;
        const double pt = ds * ds / p.tau;
        for (int y = -r.window_x; y <= r.window_x; ++y) {
          const double dy = y * g.spacing();
          const double pen = 2.0 * p.N * (dy * dy / p.xi + pt);
          const Interval& val = v.at(it + s, 0, g.wrap(ix + y));
          if (val.empty()) {
            best = sign > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
            continue;
          }
          const double w = sign > 0 ? val.hi - d(it + s) - pen : val.lo - d(it + s) + pen;
          if (sign > 0 ? w > best : w < best) {
            best = w;
            bx = y;
            bs = s;
          }
        }
      }
      const double value = best + d(it);
      r.out.at(it - t0, 0, ix) = Interval::point(value);
      r.duals.push_back({{v.x_at(ix), v.levels()[0], times[it]}, bx * g.spacing(), bs * dt, value});
    }
  return r;
}

} // namespace detail

/// v^{xi,tau}(x',t) = sup over |y'| < xi^{1/2}, |s| < tau^{1/2} of
/// v(x'+y', t+s) - 2N(|y'|^2/xi + s^2/tau), periodic in x'.
/// With a drift d(t) the convolution acts on v - d and d is added back, so the
/// paraboloids do not travel with the planar profile.
inline ConvolutionResult sup_conv(const MultiValuedSample& v, const ConvolutionParams& p,
                                  std::span<const double> drift = {}) {
  return detail::convolve(v, p, +1, drift);
}

inline ConvolutionResult inf_conv(const MultiValuedSample& v, const ConvolutionParams& p,
                                  std::span<const double> drift = {}) {
  return detail::convolve(v, p, -1, drift);
}

struct SupConvolutionReport {
  bool flatness = true;        // (a)
  bool dual_points = true;     // (b)
  bool paraboloid = true;      // (e)
  bool lipschitz = true;       // (f)
  bool rate = true;            // (g) sandwich
  bool tau_monotone = true;    // (g) decrease along the tau sweep
  double lipschitz_measured = 0.0;
  double lipschitz_bound = 0.0;
  double worst_paraboloid_gap = 0.0;  // max of paraboloid - v^{xi,tau}; <= 0 passes
  std::string witness;

  [[nodiscard]] bool all() const {
    return flatness && dual_points && paraboloid && lipschitz && rate && tau_monotone;
  }
};

/// Lipschitz bound of item (f) plus the lattice slack 2N h_x / xi.
inline double lipschitz_bound(const ConvolutionParams& p, double hx) {
  return 2.0 * p.N / std::sqrt(p.xi) + 2.0 * p.N * hx / p.xi;
}

/// Runs items (a), (b), (e), (f), (g) on the lattice. taus lists the tau sweep for the
/// monotonicity part of (g), in decreasing order; p.tau itself is the main convolution.
inline SupConvolutionReport check_lemma52(const MultiValuedSample& v, const ConvolutionParams& p,
                                   const std::vector<double>& taus = {}) {
  SupConvolutionReport rep;
  const auto& g = v.grid();
  const auto c = sup_conv(v, p);
  const auto& w = c.out;
  const double band = p.N;  // |v| <= N - 1 gives |v^{xi,tau}| <= N - 1 < N
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag) rep.witness += (rep.witness.empty() ? "" : "; ") + what;
    flag = false;
  };

  for (std::size_t k = 0; k < w.size(); ++k) {
    const double val = w[k].mid();
    const auto pt = w.point(k);
    if (!(std::abs(val) <= band)) fail(rep.flatness, "(a) at x=" + std::to_string(pt.x) + " t=" + std::to_string(pt.t));
    const auto& d = c.duals[k];
    if (!(std::abs(d.dx) < std::sqrt(p.xi) && std::abs(d.ds) < std::sqrt(p.tau)))
      fail(rep.dual_points, "(b) at x=" + std::to_string(pt.x) + " t=" + std::to_string(pt.t));
    // (g) sandwich against v and the plain windowed sup.
    const int it = static_cast<int>(k / g.size()) + c.first_time;
    const int ix = static_cast<int>(k % g.size());
    double wsup = -std::numeric_limits<double>::infinity();
    for (int s = -c.window_t; s <= c.window_t; ++s)
      for (int y = -c.window_x; y <= c.window_x; ++y)
        wsup = std::max(wsup, v.at(it + s, 0, g.wrap(ix + y)).hi);
    if (!(v.at(it, 0, ix).hi <= val && val <= wsup))
      fail(rep.rate, "(g) at x=" + std::to_string(pt.x) + " t=" + std::to_string(pt.t));
  }

  // (e): the touching paraboloid of every dual point minorizes v^{xi,tau} everywhere.
  const double inv_xi = 1.0 / p.xi, inv_tau = 1.0 / p.tau;
  rep.worst_paraboloid_gap = -std::numeric_limits<double>::infinity();
  for (const auto& d : c.duals) {
    const double zx = d.base.x + d.dx, zt = d.base.t + d.ds;
    const int iz = static_cast<int>(std::lround((zt - v.times()[0]) / (v.times()[1] - v.times()[0])));
    const int jz = g.wrap(static_cast<int>(std::lround((zx - v.x_offset()) / g.spacing())));
    const double top = v.at(iz, 0, jz).hi;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const auto q = w.point(k);
      const double dx = g.displacement(zx, q.x), dt = q.t - zt;
      const double par = top - 2.0 * p.N * (dx * dx * inv_xi + dt * dt * inv_tau);
      const double gap = par - w[k].mid();
      if (gap > rep.worst_paraboloid_gap) rep.worst_paraboloid_gap = gap;
    }
  }
  if (rep.worst_paraboloid_gap > 1e-12) fail(rep.paraboloid, "(e) paraboloid exceeds v^{xi,tau}");

  // (f): per-time Lipschitz constant over all node pairs.
  rep.lipschitz_bound = lipschitz_bound(p, g.spacing());
  for (int it = 0; it < w.ntimes(); ++it)
    for (int i = 0; i < g.size(); ++i)
      for (int j = i + 1; j < g.size(); ++j) {
        const double dist = std::abs(g.displacement(w.x_at(i), w.x_at(j)));
        const double L = std::abs(w.at(it, 0, i).mid() - w.at(it, 0, j).mid()) / dist;
        rep.lipschitz_measured = std::max(rep.lipschitz_measured, L);
      }
  if (rep.lipschitz_measured > rep.lipschitz_bound) fail(rep.lipschitz, "(f) Lipschitz bound");

  // (g): pointwise decrease along the tau sweep on the common output region.
  if (!taus.empty()) {
    const double t_lo = w.times().front(), t_hi = w.times().back();
    std::vector<ConvolutionResult> sweep;
    for (double tau : taus) {
      auto q = p;
      q.tau = tau;
      sweep.push_back(sup_conv(v, q));
    }
    for (std::size_t s = 1; s < sweep.size(); ++s) {
      const auto& big = sweep[s - 1].out;
      const auto& small = sweep[s].out;
      for (int it = 0; it < big.ntimes(); ++it) {
        const double t = big.times()[it];
        if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
        const int js = it + sweep[s - 1].first_time - sweep[s].first_time;
        if (js < 0 || js >= small.ntimes()) continue;
        for (int ix = 0; ix < g.size(); ++ix)
          if (small.at(js, 0, ix).mid() > big.at(it, 0, ix).mid())
            fail(rep.tau_monotone, "(g) tau sweep at t=" + std::to_string(t));
      }
    }
  }
  return rep;
}

/// Lattice second difference lower bound of the sup-convolution, -4 N h^2 / xi.
inline double semiconvexity_violation(const ConvolutionResult& c, const ConvolutionParams& p) {
  const auto& w = c.out;
  const auto& g = w.grid();
  double worst = 0.0;
  for (int it = 0; it < w.ntimes(); ++it)
    for (int m = 1; m <= c.window_x; ++m) {
      const double h = m * g.spacing();
      for (int ix = 0; ix < g.size(); ++ix) {
        const double d2 = w.at(it, 0, g.wrap(ix + m)).mid() + w.at(it, 0, g.wrap(ix - m)).mid() -
                          2.0 * w.at(it, 0, ix).mid();
        worst = std::max(worst, -4.0 * p.N * h * h / p.xi - d2);
      }
    }
  return worst;
}

} // namespace hsflat

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hsflat/core/multivalued.hpp"
#include "hsflat/core/seminorm.hpp"
#include "hsflat/model/frac_heat.hpp"
#include "hsflat/model/hodograph.hpp"

namespace hsflat {

// ---------------------------------------------------------------- linearization

struct GapReport {
  double gap = 0.0;
  std::vector<double> times;     // analysis frame
  std::vector<double> per_time;  // sup over x' at each time
};

/// Sup-norm distance between the simulated trace and the linear evolution of its first
/// slice under the finite-depth multiplier with depth L(t) = gamma0 + A(t) + H.
inline GapReport linearization_gap(const HodographTrace& tr, double H, const Schedule& schedule) {
  if (!(schedule == tr.a))
    throw InvalidArgument("linearization_gap: schedule does not match the trace's schedule");
  const auto& v = tr.values;
  const auto& g = v.grid();
  const auto u0 = v.row_mid(0, 0);
  const double L0 = tr.gamma0 + tr.A[0] + H;
  GapReport rep;
  for (int it = 0; it < v.ntimes(); ++it) {
    const auto lin = evolve_moving_depth(g, u0, L0, tr.gamma0 + tr.A[it] + H);
    double m = 0.0;
    for (int ix = 0; ix < v.nx(); ++ix) {
      const Interval& s = v.at(it, 0, ix);
      m = std::max(m, std::max(std::abs(s.hi - lin[ix]), std::abs(s.lo - lin[ix])));
    }
    rep.times.push_back(v.times()[it]);
    rep.per_time.push_back(m);
    rep.gap = std::max(rep.gap, m);
  }
  return rep;
}

// ---------------------------------------------------------------- oscillation decay

struct DecayParams {
  double x0 = 0.0;
  double t_top = 0.0;
  double rho0 = 2.0;
  double mu = 0.5;
  double r_min = 0.2;  // truncation scale C*eps
};

struct DecayLevel {
  int m = 0;
  double radius = 0.0;
  double osc = 0.0;
  double contraction = 1.0;  // osc_m / osc_{m-1}; 1 for m = 0
  std::size_t nodes = 0;
};

struct DecayReport {
  std::vector<DecayLevel> levels;
  double theta = 0.0;
  double alpha = 0.0;
  bool degenerate = false;
};

/// Oscillation over nested cylinders Q_{rho0 mu^m}(x0, t_top) down to r_min.
inline DecayReport oscillation_decay(const MultiValuedSample& v, const DecayParams& p) {
  detail::require(p.mu > 0.0 && p.mu < 1.0, "oscillation_decay: mu must lie in (0,1)");
  detail::require(p.rho0 > 0.0 && p.r_min > 0.0, "oscillation_decay: radii must be positive");
  if (p.r_min < v.grid().spacing())
    throw InvalidArgument("oscillation_decay: truncation scale " + std::to_string(p.r_min) +
                          " is below the lattice spacing " + std::to_string(v.grid().spacing()));
  DecayReport rep;
  double max_contraction = 0.0;
  for (int m = 0;; ++m) {
    const double rad = p.rho0 * std::pow(p.mu, m);
    if (rad < p.r_min * (1.0 - 1e-12)) break;
    const auto reg = region_cylinder(v, p.x0, p.t_top, rad, "Q_" + std::to_string(rad));
    DecayLevel lvl{m, rad, oscillation(v, reg), 1.0, reg.nodes.size()};
    if (m > 0) {
      const double prev = rep.levels.back().osc;
      lvl.contraction = prev > 0.0 ? lvl.osc / prev : 1.0;
      if (prev == 0.0) rep.degenerate = true;
      max_contraction = std::max(max_contraction, lvl.contraction);
    }
    rep.levels.push_back(lvl);
  }
  if (rep.levels.size() < 2 || rep.levels.front().osc == 0.0) rep.degenerate = true;
  if (!rep.degenerate) {
    rep.theta = 1.0 - max_contraction;
    rep.alpha = rep.theta < 1.0 ? std::log(1.0 - rep.theta) / std::log(p.mu)
                                : std::numeric_limits<double>::infinity();
  }
  return rep;
}

// ---------------------------------------------------------------- bootstrap ladder

struct LadderParams {
  double alpha_cfg = 0.25;
  double eps = 0.05;
  double C = 4.0;          // truncation and minimal step are C*eps
  double radius = 1.0;     // physical radius of the measurement ball
  double x_center = 0.0;
  std::size_t min_points = 16;
};

struct Rung {
  int k = 0;
  double beta = 0.0;
  double eta = 0.0;
  double r = 0.0;           // 16^{-(k+1)}
  double scale = 1.0;       // radius / r_k
  int steps = 0;            // lattice h used
  double value = 0.0;       // physical sup over h
  double normalized = 0.0;  // scale^{beta+eta} * value
  double witness_h = 0.0;
  bool resolved = false;
};

struct LadderReport {
  double alpha = 0.0;  // 1/M
  int M = 0;
  std::vector<Rung> rungs;
  int resolved = 0;
  std::string diagnostic;
};

/// Rung schedule beta_k = alpha/2 + k alpha, eta_k = (1 - beta) alpha^k with beta = 1 - alpha/2,
/// r_k = 16^{-(k+1)} for k = 0..M-2, alpha = 1/M, M = ceil(1/alpha_cfg). Every rung is
/// measured on the same physical ball of the trace, which is the rung's ball r_k blown up
/// by radius/r_k.
inline LadderReport bootstrap_ladder(const MultiValuedSample& trace, const LadderParams& p) {
  detail::require(p.alpha_cfg > 0.0 && p.alpha_cfg <= 1.0, "bootstrap_ladder: alpha_cfg in (0,1]");
  LadderReport rep;
  rep.M = static_cast<int>(std::ceil(1.0 / p.alpha_cfg - 1e-12));
  rep.alpha = 1.0 / rep.M;
  const double a = rep.alpha, beta = 1.0 - a / 2.0;
  const double tr = p.C * p.eps;
  const double t_top = trace.times().back();

  Region ball{{}, "B^d(" + std::to_string(p.x_center) + ", " + std::to_string(t_top) + ")"};
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto q = trace.point(k);
    const ParabolicPoint c{p.x_center, 0.0, t_top};
    if (q.t <= t_top && metric_d_periodic(trace.grid(), c, q) < p.radius) ball.nodes.push_back(k);
  }

  std::vector<double> steps;
  const double hx = trace.grid().spacing();
  for (int m = 1; m * hx < p.radius; ++m)
    if (m * hx > tr) steps.push_back(m * hx);

  for (int k = 0; k + 2 <= rep.M; ++k) {
    Rung r;
    r.k = k;
    r.beta = a / 2.0 + k * a;
    r.eta = (1.0 - beta) * std::pow(a, k);
    r.r = std::pow(16.0, -(k + 1));
    r.scale = p.radius / r.r;
    r.steps = static_cast<int>(steps.size());
    r.resolved = steps.size() >= 2 && ball.nodes.size() >= p.min_points;
    if (r.resolved) {
      for (double h : steps) {
        const auto q = diff_quotient(trace, h, +1, r.beta);
        // Staggered outputs: keep the nodes whose own position lies in the ball.
        Region qb{{}, ball.description};
        for (std::size_t n = 0; n < q.size(); ++n) {
          const auto pt = q.point(n);
          if (pt.t <= t_top &&
              metric_d_periodic(q.grid(), {p.x_center, 0.0, t_top}, pt) < p.radius)
            qb.nodes.push_back(n);
        }
        const auto s = trunc_holder(q, qb, r.eta, tr);
        if (s.value > r.value) {
          r.value = s.value;
          r.witness_h = h;
        }
      }
      r.normalized = std::pow(r.scale, r.beta + r.eta) * r.value;
      ++rep.resolved;
    }
    rep.rungs.push_back(r);
  }
  if (rep.resolved < 3)
    rep.diagnostic = "insufficient rungs: " + std::to_string(rep.resolved) +
                     " resolved (need lattice steps in (C*eps, radius) = (" + std::to_string(tr) +
                     ", " + std::to_string(p.radius) + "), have " + std::to_string(steps.size()) +
                     ")";
  return rep;
}

// ---------------------------------------------------------------- gradient Hoelder

struct GradientHolderReport {
  SeminormReport seminorm;
  double disagreement = 0.0;  // max |D_h - D_2h| / max |R|
  bool resolved = false;
};

/// Richardson-extrapolated x'-derivative (4 D_h - D_2h)/3 with centered steps 2h_x and 4h_x.
inline MultiValuedSample richardson_derivative(const MultiValuedSample& v, double* disagreement) {
  const double hx = v.grid().spacing();
  const auto d1 = diff_quotient(v, 2.0 * hx, +1, 1.0);
  const auto d2 = diff_quotient(v, 4.0 * hx, +1, 1.0);
  MultiValuedSample out(v.grid(), v.levels(), v.times(), v.x_offset());
  double diff = 0.0, mag = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = d1[k].mid(), b = d2[k].mid();
    const double r = (4.0 * a - b) / 3.0;
    out[k] = Interval::point(r);
    diff = std::max(diff, std::abs(a - b));
    mag = std::max(mag, std::abs(r));
  }
  if (disagreement) *disagreement = mag > 0.0 ? diff / mag : 0.0;
  return out;
}

inline GradientHolderReport gradient_holder(const MultiValuedSample& v, const Region& region,
                                            double exponent, double guard = 0.05) {
  GradientHolderReport rep;
  const auto d = richardson_derivative(v, &rep.disagreement);
  rep.resolved = rep.disagreement <= guard;
  rep.seminorm = trunc_holder(d, region, exponent, 0.0);
  return rep;
}

// ---------------------------------------------------------------- interpolation lemmas

/// Interval-valued function on the lattice x_j = -1 + j*(2/n), j = 0..n.
struct LineField {
  std::vector<Interval> v;

  [[nodiscard]] int n() const { return static_cast<int>(v.size()) - 1; }
  [[nodiscard]] double step() const { return 2.0 / n(); }
  [[nodiscard]] double x(int j) const { return -1.0 + j * step(); }

  static LineField from(const std::vector<double>& values) {
    LineField f;
    for (double s : values) f.v.push_back(Interval::point(s));
    return f;
  }
  template <class F>
  static LineField sample(int n, F&& fn) {
    LineField f;
    for (int j = 0; j <= n; ++j) f.v.push_back(Interval::point(fn(-1.0 + 2.0 * j / n)));
    return f;
  }
};

struct A2Report {
  bool hypothesis = true;
  bool conclusion = true;
  double hyp_x = 0.0, hyp_h = 0.0, hyp_value = 0.0;  // worst second difference
  double concl_x = 0.0, concl_value = 0.0;           // largest value on the inner set
  [[nodiscard]] bool consistent() const { return !hypothesis || conclusion; }
};

/// Maximum-principle lemma on the lattice: with second differences over lattice steps
/// h in [max(h0, dx), 1] (h = 1 included) bounded below by -1 and v(+-1) touching (-inf, 0],
/// the values on [-1+h0, 1-h0] stay <= 1. The implication holds for h0 = 0 only; for
/// h0 > 0 a bump narrower than h0 near the ends escapes the hypothesis.
inline A2Report verify_interp_A2(const LineField& f, double h0) {
  const int n = f.n();
  detail::require(n >= 2 && n % 2 == 0, "verify_interp_A2: need an even number of cells");
  for (const auto& s : f.v) detail::require(!s.empty(), "verify_interp_A2: empty value");
  A2Report r;
  r.hyp_value = std::numeric_limits<double>::infinity();
  if (!(f.v.front().lo <= 0.0) || !(f.v.back().lo <= 0.0)) {
    r.hypothesis = false;
    r.hyp_x = f.v.front().lo <= 0.0 ? 1.0 : -1.0;
  }
  const double dx = f.step();
  for (int m = 1; m <= n / 2; ++m) {
    const double h = m * dx;
    if (!(h > h0 - 1e-12)) continue;
    for (int j = m; j + m <= n; ++j) {
      const double low = f.v[j + m].lo + f.v[j - m].lo - 2.0 * f.v[j].hi;
      if (low < r.hyp_value) {
        r.hyp_value = low;
        r.hyp_x = f.x(j);
        r.hyp_h = h;
      }
    }
  }
  if (r.hyp_value < -1.0) r.hypothesis = false;
  r.concl_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= n; ++j) {
    if (std::abs(f.x(j)) > 1.0 - h0 + 1e-12) continue;
    if (f.v[j].hi > r.concl_value) {
      r.concl_value = f.v[j].hi;
      r.concl_x = f.x(j);
    }
  }
  r.conclusion = r.concl_value <= 1.0;
  return r;
}

struct A3Report {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // C(1 - (alpha + beta))
  bool ok = true;
};

/// Constant of the first-difference interpolation estimate: max(8, 1/(1 - 2^{-(1-s)})).
inline double interp_constant_A3(double s) {
  detail::require(s > 0.0 && s < 1.0, "interp_constant_A3: need 0 < s < 1");
  return std::max(8.0, 1.0 / (1.0 - std::pow(2.0, -(1.0 - s))));
}

inline A3Report verify_interp_A3(const LineField& f, double alpha, double beta, double h0) {
  const double s = alpha + beta;
  detail::require(alpha > 0.0 && beta > 0.0 && s < 1.0, "verify_interp_A3: need beta + alpha < 1");
  const int n = f.n();
  const double dx = f.step();
  A3Report r;
  for (int m = 1; m < n; ++m) {  // h < 2
    const double h = m * dx;
    if (!(h > h0 + 1e-12)) continue;
    const double scale = std::pow(h, s);
    for (int j = 0; j + m <= n; ++j) r.lhs = std::max(r.lhs, spread(f.v[j + m], f.v[j]) / scale);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : f.v) {
    lo = std::min(lo, v.lo);
    hi = std::max(hi, v.hi);
  }
  double second = 0.0;
  for (int m = 1; 2 * m < n; ++m) {  // h < 1
    const double h = m * dx;
    if (!(h > h0 + 1e-12)) continue;
    const double scale = std::pow(h, s);
    for (int j = m; j + m <= n; ++j) {
      const Interval d = f.v[j + m] + f.v[j - m] - 2.0 * f.v[j];
      second = std::max(second, d.abs_max() / scale);
    }
  }
  r.rhs = (hi - lo) + second;
  r.ratio = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
  r.bound = interp_constant_A3(s);
  r.ok = r.ratio <= r.bound;
  return r;
}

struct A5Report {
  double hypothesis = 0.0;   // sup_h [delta_h v / h^beta]_{C^alpha} before normalization
  double seminorm = 0.0;     // [lattice derivative]_{C^{alpha+beta-1}} of the normalized v
  double C = 0.0;            // 4 / (2^{alpha+beta-1} - 1)
  double slack = 0.0;
  bool inconclusive = false;
  bool passed = false;
};

inline double interp_constant_A5(double alpha, double beta) {
  detail::require(alpha + beta > 1.0, "interp_constant_A5: need alpha + beta > 1");
  return 4.0 / (std::pow(2.0, alpha + beta - 1.0) - 1.0);
}

/// sup over lattice h in (0,2) of the C^alpha seminorm of delta_h v / h^beta on [-1+h/2, 1-h/2].
inline double difference_holder(const LineField& f, double alpha, double beta) {
  const int n = f.n();
  const double dx = f.step();
  double best = 0.0;
  std::vector<double> q;
  for (int m = 1; m < n; ++m) {
    const double h = m * dx;
    const double scale = std::pow(h, beta);
    q.assign(n - m + 1, 0.0);
    for (int j = 0; j + m <= n; ++j) q[j] = (f.v[j + m].mid() - f.v[j].mid()) / scale;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = i + 1; j < q.size(); ++j)
        best = std::max(best, std::abs(q[i] - q[j]) / std::pow((j - i) * dx, alpha));
  }
  return best;
}

/// Derivative estimate for alpha + beta > 1: after normalizing the difference-quotient
/// hypothesis to 1, the centered lattice derivative has C^{alpha+beta-1} seminorm <= C.
inline A5Report verify_interp_A5(const LineField& f, double alpha, double beta,
                                 double slack_fraction = 0.01) {
  A5Report r;
  r.C = interp_constant_A5(alpha, beta);
  r.slack = slack_fraction * r.C;
  for (const auto& s : f.v)
    if (!s.singleton()) {
      r.inconclusive = true;
      return r;
    }
  r.hypothesis = difference_holder(f, alpha, beta);
  if (!(r.hypothesis > 0.0) || !std::isfinite(r.hypothesis)) {
    r.passed = true;  // v affine: derivative constant
    return r;
  }
  const int n = f.n();
  const double dx = f.step();
  std::vector<double> d(n - 1);
  for (int j = 1; j < n; ++j)
    d[j - 1] = (f.v[j + 1].mid() - f.v[j - 1].mid()) / (2.0 * dx) / r.hypothesis;
  const double e = alpha + beta - 1.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j)
      r.seminorm = std::max(r.seminorm, std::abs(d[i] - d[j]) / std::pow((j - i) * dx, e));
  r.passed = r.seminorm <= r.C + r.slack;
  return r;
}

// ---------------------------------------------------------------- barrier ODE

/// r' + C r = c eps f(t), r(-3/4) = 0, with f the indicator of a union of intervals.
struct DensitySchedule {
  std::vector<std::pair<double, double>> on;  // disjoint [a, b] inside (-3/4, 0]

  [[nodiscard]] double operator()(double t) const {
    for (auto [a, b] : on)
      if (t >= a && t <= b) return 1.0;
    return 0.0;
  }
};

inline double harnack_barrier_ode(const DensitySchedule& f, double c, double C, double eps,
                                  double t) {
  detail::require(c > 0.0 && C > 0.0 && eps > 0.0, "harnack_barrier_ode: need c, C, eps > 0");
  double acc = 0.0;
  for (auto [a, b] : f.on) {
    a = std::max(a, -0.75);
    const double hi = std::min(b, t);
    if (hi <= a) continue;
    acc += (std::exp(-C * (t - hi)) - std::exp(-C * (t - a))) / C;
  }
  return c * eps * acc;
}

} // namespace hsflat

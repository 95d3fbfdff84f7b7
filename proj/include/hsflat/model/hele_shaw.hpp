#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "hsflat/model/laplace_strip.hpp"

namespace hsflat {

struct Snapshot {
  double t = 0.0;
  double A = 0.0;
  std::vector<double> gamma;
  std::vector<double> grad;  // |Du| along the free boundary
};

struct Trajectory {
  StripGrid grid;
  double H = 2.0;
  double gamma0 = 0.0;
  Schedule a;
  double dt = 0.0;
  std::vector<Snapshot> snapshots;
};

/// Forward Euler for the graph form of the free boundary law. The pressure is solved
/// once per step with unit flux; since the pressure is linear in the flux, the
/// increment uses the exact integral of a(t) over the step.
class Simulator {
public:
  explicit Simulator(InterfaceState s) : s_(std::move(s)), solver_(s_.grid) { validate_state(s_); }

  [[nodiscard]] const InterfaceState& state() const noexcept { return s_; }

  /// Largest admissible step: 0.5 h_x / (pi max a).
  [[nodiscard]] double dt_max() const {
    return 0.5 * s_.grid.hx() / (std::numbers::pi * s_.a.max());
  }

  /// Unit-flux graph speed (1 + gamma'^2) |U_y| / D of the current state.
  std::vector<double> unit_speed() {
    const int nx = s_.grid.nx();
    const std::vector<double> flux(nx, 1.0), top(nx, 0.0);
    auto u = solver_.solve(s_.gamma, s_.H, flux, top, warm_);
    warm_ = u.u;
    last_iterations_ = u.stats.iterations;
    const auto grad = boundary_gradient(u);
    const auto dg = periodic_derivative(s_.grid.horizontal(), s_.gamma);
    std::vector<double> v(nx);
    for (int i = 0; i < nx; ++i) v[i] = grad[i] * std::sqrt(1.0 + dg[i] * dg[i]);
    last_grad_ = grad;
    return v;
  }

  /// |Du| at the current state for the current flux a(t).
  std::vector<double> gradient() {
    unit_speed();
    auto g = last_grad_;
    for (double& x : g) x *= s_.a(s_.t);
    return g;
  }

  void step(double dt) {
    if (!(dt > 0.0) || dt > dt_max() * (1.0 + 1e-12))
      throw InvalidArgument("step: dt = " + std::to_string(dt) + " violates the stability bound " +
                            std::to_string(dt_max()));
    const auto v = unit_speed();
    const double dA = s_.a.integral(s_.t, s_.t + dt);
    for (int i = 0; i < s_.grid.nx(); ++i) s_.gamma[i] += dA * v[i];
    s_.t += dt;
    s_.A += dA;
    const auto dg = periodic_derivative(s_.grid.horizontal(), s_.gamma);
    for (double d : dg)
      if (!(std::abs(d) <= 1.0))
        throw NumericError("step: front slope exceeds 1 at t = " + std::to_string(s_.t) +
                           "; the graph description is no longer trusted");
    validate_state(s_);
  }

  [[nodiscard]] int last_iterations() const noexcept { return last_iterations_; }

private:
  InterfaceState s_;
  PressureSolver solver_;
  std::vector<double> warm_;
  std::vector<double> last_grad_;
  int last_iterations_ = 0;
};

struct Mode {
  int k = 1;
  double amplitude = 0.0;
  double phase = 0.0;
};

struct RunSpec {
  int nx = 128;
  int ny = 32;
  double length = 2.0 * std::numbers::pi;
  double H = 2.0;
  double gamma0 = 0.0;
  std::vector<Mode> modes;
  Schedule a;
  double T = 1.0;
  double dt = 1e-3;
  int snapshot_every = 1;
};

inline InterfaceState initial_state(const RunSpec& spec) {
  InterfaceState s;
  s.grid = StripGrid(PeriodicGrid1D(spec.nx, spec.length), spec.ny);
  s.H = spec.H;
  s.a = spec.a;
  s.gamma0 = spec.gamma0;
  s.gamma.assign(spec.nx, spec.gamma0);
  const auto& g = s.grid.horizontal();
  for (const auto& m : spec.modes)
    for (int i = 0; i < spec.nx; ++i)
      s.gamma[i] += m.amplitude * std::cos(g.wavenumber(m.k) * g.x(i) + m.phase);
  return s;
}

/// Fixed-step run from t = 0 to T with snapshots every snapshot_every steps and at T.
/// On a failed step the error is rethrown after the partial trajectory is stored in *partial.
inline Trajectory run(const RunSpec& spec, Trajectory* partial = nullptr) {
  detail::require(spec.dt > 0.0 && spec.T >= 0.0, "run: need dt > 0 and T >= 0");
  detail::require(spec.snapshot_every >= 1, "run: snapshot cadence must be >= 1");
  const double steps_real = spec.T / spec.dt;
  const long steps = std::lround(steps_real);
  detail::require(std::abs(steps_real - steps) < 1e-9 * std::max(1.0, steps_real),
                  "run: T must be an integer multiple of dt");
  Simulator sim(initial_state(spec));
  Trajectory traj{sim.state().grid, spec.H, spec.gamma0, spec.a, spec.dt, {}};
  auto snap = [&] {
    traj.snapshots.push_back({sim.state().t, sim.state().A, sim.state().gamma, sim.gradient()});
  };
  try {
    snap();
    for (long n = 1; n <= steps; ++n) {
      sim.step(spec.dt);
      if (n % spec.snapshot_every == 0 || n == steps) snap();
    }
  } catch (...) {
    if (partial) *partial = traj;
    throw;
  }
  return traj;
}

inline double dispersion_oracle(int k, double a, double L) {
  detail::require(k >= 1 && a > 0.0 && L > 0.0, "dispersion_oracle: need k >= 1, a > 0, L > 0");
  return -a * k * std::tanh(k * L);
}

/// Amplitude of Fourier mode k of a periodic sample.
inline double mode_amplitude(const PeriodicGrid1D& g, std::span<const double> f, int k) {
  double c = 0.0, s = 0.0;
  const double kappa = g.wavenumber(k);
  for (int i = 0; i < g.size(); ++i) {
    c += f[i] * std::cos(kappa * g.x(i));
    s += f[i] * std::sin(kappa * g.x(i));
  }
  return 2.0 / g.size() * std::hypot(c, s);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    rr += e * e;
  }
  f.rms_residual = std::sqrt(rr / n);
  return f;
}

struct DispersionFit {
  int k = 1;
  double measured = 0.0;
  double predicted = 0.0;
  double half_laplacian = 0.0;  // -a k
  double depth = 0.0;
  double relative_error = 0.0;
  double fit_residual = 0.0;
};

/// Log-linear regression of the mode-k amplitude over the trajectory, for constant a.
inline DispersionFit fit_dispersion(const Trajectory& traj, int k) {
  detail::require(traj.snapshots.size() >= 3, "fit_dispersion: need >= 3 snapshots");
  const auto& g = traj.grid.horizontal();
  std::vector<double> t, la;
  for (const auto& s : traj.snapshots) {
    t.push_back(s.t);
    la.push_back(std::log(mode_amplitude(g, s.gamma, k)));
  }
  const auto fit = fit_line(t, la);
  const auto& mid = traj.snapshots[traj.snapshots.size() / 2];
  const double L = std::accumulate(mid.gamma.begin(), mid.gamma.end(), 0.0) / g.size() + traj.H;
  const double a = traj.a(mid.t);
  DispersionFit d;
  d.k = k;
  d.measured = fit.slope;
  d.depth = L;
  d.predicted = -a * g.wavenumber(k) * std::tanh(g.wavenumber(k) * L);
  d.half_laplacian = -a * g.wavenumber(k);
  d.relative_error = std::abs(d.measured - d.predicted) / std::abs(d.predicted);
  d.fit_residual = fit.rms_residual;
  return d;
}

struct FlatnessReport {
  bool flat = false;
  double worst = 0.0;   // max |gamma - gamma0 - A|
  double margin = 0.0;  // eps - worst
  double worst_t = 0.0;
};

/// Graph form of the planar sandwich: |gamma(x',t) - (gamma0 + A(t))| <= eps at every snapshot.
inline FlatnessReport flatness_check(const Trajectory& traj, double eps) {
  FlatnessReport r;
  for (const auto& s : traj.snapshots)
    for (double g : s.gamma) {
      const double dev = std::abs(g - traj.gamma0 - s.A);
      if (dev > r.worst) {
        r.worst = dev;
        r.worst_t = s.t;
      }
    }
  r.margin = eps - r.worst;
  r.flat = r.worst <= eps && (eps > 0.0 || r.worst == 0.0);
  return r;
}

} // namespace hsflat

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "hsflat/core/error.hpp"
#include "hsflat/core/fft.hpp"
#include "hsflat/core/grid.hpp"
#include "hsflat/model/schedule.hpp"

namespace hsflat {

/// Free boundary x_n = gamma(x') above a flat bottom x_n = -H, periodic in x'.
struct InterfaceState {
  StripGrid grid;
  std::vector<double> gamma;
  double t = 0.0;
  double H = 2.0;
  Schedule a;
  double A = 0.0;       // accumulated displacement, integral of a from the start time
  double gamma0 = 0.0;  // reference front height at the start time
};

/// Rejects states whose fluid layer is too thin to resolve.
inline void validate_state(const InterfaceState& s) {
  detail::require(s.H > 0.0, "InterfaceState: depth H must be positive");
  detail::require(s.gamma.size() == static_cast<std::size_t>(s.grid.nx()),
                  "InterfaceState: gamma has the wrong size");
  double lo = s.gamma[0], hi = s.gamma[0];
  for (double g : s.gamma) {
    if (!std::isfinite(g)) throw NumericError("InterfaceState: non-finite front height");
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  if (!(lo > -s.H + 4.0 * s.grid.hy() * (s.H + hi)))
    throw NumericError("InterfaceState: fluid layer pinches (min gamma = " + std::to_string(lo) +
                       ", H = " + std::to_string(s.H) + ")");
}

/// Centered derivative of a periodic sample.
inline std::vector<double> periodic_derivative(const PeriodicGrid1D& g, std::span<const double> f) {
  const int n = g.size();
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = (f[g.wrap(i + 1)] - f[g.wrap(i - 1)]) / (2.0 * g.spacing());
  return d;
}

/// Symmetric coefficient matrix of the flattened operator, per node.
/// With x_n = -H + y*D(x'), D = gamma + H, the Dirichlet form becomes
/// int grad(u)^T K grad(v) dx'dy with K = [[D, -yD'], [-yD', (1+y^2 D'^2)/D]] and det K = 1.
struct CoefficientField {
  StripGrid grid;
  std::vector<std::array<double, 3>> k;  // (K11, K12, K22) per node
};

inline std::array<double, 3> mapped_coefficients(double D, double dD, double y) {
  return {D, -y * dD, (1.0 + y * y * dD * dD) / D};
}

inline CoefficientField build_mapping(const InterfaceState& s) {
  validate_state(s);
  const auto& g = s.grid;
  std::vector<double> D(g.nx());
  for (int i = 0; i < g.nx(); ++i) D[i] = s.gamma[i] + s.H;
  const auto dD = periodic_derivative(g.horizontal(), D);
  CoefficientField c{g, std::vector<std::array<double, 3>>(g.node_count())};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) c.k[g.index(i, j)] = mapped_coefficients(D[i], dD[i], g.y(j));
  return c;
}

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Pressure on the mapped strip, row-major with row 0 at the bottom.
struct ScalarField2D {
  StripGrid grid;
  std::vector<double> u;
  std::vector<double> gamma;
  double H = 2.0;
  SolveStats stats;

  [[nodiscard]] double at(int i, int j) const { return u[grid.index(i, j)]; }
};

/// Q1 finite elements on the physical quadrilaterals of the mapped strip (bilinear
/// isoparametric map, so fields linear in x_n are reproduced exactly), solved by
/// conjugate gradients preconditioned with the exact inverse of the flat-strip operator.
class PressureSolver {
public:
  explicit PressureSolver(const StripGrid& g) : g_(g), fft_(g.nx()) {}

  [[nodiscard]] const StripGrid& grid() const noexcept { return g_; }

  /// Solves with bottom inward flux flux[i] (= -du/dx_n) and top Dirichlet data top[i].
  /// warm, if non-empty, is a full-size initial guess.
  ScalarField2D solve(std::span<const double> gamma, double H, std::span<const double> flux,
                      std::span<const double> top, std::span<const double> warm = {}) {
    const int nx = g_.nx(), ny = g_.ny();
    detail::require(gamma.size() == static_cast<std::size_t>(nx) &&
                        flux.size() == static_cast<std::size_t>(nx) &&
                        top.size() == static_cast<std::size_t>(nx),
                    "PressureSolver: input size mismatch");
    assemble(gamma, H);
    const std::size_t m = static_cast<std::size_t>(nx) * (ny - 1);
    const double hx = g_.hx();

    std::vector<double> b(m, 0.0);
    for (int i = 0; i < nx; ++i)
      b[i] = hx * (flux[g_.horizontal().wrap(i - 1)] + 4.0 * flux[i] +
                   flux[g_.horizontal().wrap(i + 1)]) / 6.0;
    // Lift the Dirichlet data of the top row into the right-hand side.
    const int jt = ny - 2;
    for (int i = 0; i < nx; ++i) {
      const double* c = &stencil_[g_.index(i, jt) * 9];
      for (int di = -1; di <= 1; ++di) b[g_.index(i, jt)] -= c[6 + di + 1] * top[g_.horizontal().wrap(i + di)];
    }

    std::vector<double> x(m, 0.0);
    if (warm.size() == g_.node_count()) std::copy(warm.begin(), warm.begin() + m, x.begin());

    ScalarField2D out{g_, std::vector<double>(g_.node_count()),
                      std::vector<double>(gamma.begin(), gamma.end()), H, {}};
    pcg(b, x, out.stats);
    std::copy(x.begin(), x.end(), out.u.begin());
    for (int i = 0; i < nx; ++i) out.u[g_.index(i, ny - 1)] = top[i];
    return out;
  }

  /// Applies the assembled operator (reduced to the free rows); exposed for tests.
  void apply(std::span<const double> x, std::span<double> y) const {
    const int nx = g_.nx(), ny = g_.ny();
    const auto& hz = g_.horizontal();
    for (int j = 0; j < ny - 1; ++j)
      for (int i = 0; i < nx; ++i) {
        const double* c = &stencil_[g_.index(i, j) * 9];
        double acc = 0.0;
        for (int dj = -1; dj <= 1; ++dj) {
          const int jj = j + dj;
          if (jj < 0 || jj > ny - 2) continue;
          for (int di = -1; di <= 1; ++di)
            acc += c[(dj + 1) * 3 + di + 1] * x[g_.index(hz.wrap(i + di), jj)];
        }
        y[g_.index(i, j)] = acc;
      }
  }

  void assemble(std::span<const double> gamma, double H) {
    const int nx = g_.nx(), ny = g_.ny();
    const double hx = g_.hx(), hy = g_.hy();
    stencil_.assign(g_.node_count() * 9, 0.0);
    static constexpr double gp[2] = {0.5 - 0.5 / std::numbers::sqrt3, 0.5 + 0.5 / std::numbers::sqrt3};
    double dsum = 0.0;
    for (int i = 0; i < nx; ++i) dsum += gamma[i] + H;
    dbar_ = dsum / nx;

    for (int j = 0; j < ny - 1; ++j)
      for (int i = 0; i < nx; ++i) {
        const int ip = g_.horizontal().wrap(i + 1);
        const double D0 = gamma[i] + H, D1 = gamma[ip] + H;
        const double dD = (D1 - D0) / hx;
        double ke[4][4] = {};
        for (double s : gp)
          for (double r : gp) {
            const auto K = mapped_coefficients(D0 + s * (D1 - D0), dD, g_.y(j) + r * hy);
            // Physical-parameter gradients of the four bilinear shape functions.
            const double gx[4] = {-(1 - r) / hx, (1 - r) / hx, -r / hx, r / hx};
            const double gy[4] = {-(1 - s) / hy, -s / hy, (1 - s) / hy, s / hy};
            for (int a = 0; a < 4; ++a)
              for (int bb = 0; bb < 4; ++bb)
                ke[a][bb] += 0.25 * hx * hy *
                             (K[0] * gx[a] * gx[bb] + K[1] * (gx[a] * gy[bb] + gy[a] * gx[bb]) +
                              K[2] * gy[a] * gy[bb]);
          }
        static constexpr int ox[4] = {0, 1, 0, 1}, oy[4] = {0, 0, 1, 1};
        for (int a = 0; a < 4; ++a) {
          const int ia = g_.horizontal().wrap(i + ox[a]), ja = j + oy[a];
          double* c = &stencil_[g_.index(ia, ja) * 9];
          for (int bb = 0; bb < 4; ++bb)
            c[(oy[bb] - oy[a] + 1) * 3 + (ox[bb] - ox[a] + 1)] += ke[a][bb];
        }
      }
    factor_preconditioner();
  }

private:
  void factor_preconditioner() {
    const int nx = g_.nx(), my = g_.ny() - 1;
    const double hx = g_.hx(), hy = g_.hy();
    const int modes = nx / 2 + 1;
    diag_.assign(static_cast<std::size_t>(modes) * my, 0.0);
    upper_.assign(static_cast<std::size_t>(modes) * my, 0.0);
    off_.assign(modes, 0.0);
    for (int k = 0; k < modes; ++k) {
      const double th = 2.0 * std::numbers::pi * k / nx;
      const double lA = (2.0 - 2.0 * std::cos(th)) / hx;
      const double lM = hx * (4.0 + 2.0 * std::cos(th)) / 6.0;
      const double cA = lM / dbar_, cM = dbar_ * lA;
      const double off = cA * (-1.0 / hy) + cM * (hy / 6.0);
      off_[k] = off;
      // Thomas factorization; row 0 is the Neumann bottom with half weights.
      double prev_u = 0.0;
      for (int j = 0; j < my; ++j) {
        const double d = j == 0 ? cA / hy + cM * (2.0 * hy / 6.0) : cA * 2.0 / hy + cM * (4.0 * hy / 6.0);
        const double piv = j == 0 ? d : d - off * prev_u;
        diag_[k * my + j] = piv;
        prev_u = off / piv;
        upper_[k * my + j] = prev_u;
      }
    }
  }

  void precondition(std::span<const double> r, std::span<double> z) {
    const int nx = g_.nx(), my = g_.ny() - 1;
    const int modes = nx / 2 + 1;
    coeffs_.resize(static_cast<std::size_t>(modes) * my);
    for (int j = 0; j < my; ++j) {
      auto c = fft_.forward(r.subspan(static_cast<std::size_t>(j) * nx, nx));
      for (int k = 0; k < modes; ++k) coeffs_[k * my + j] = c[k];
    }
    for (int k = 0; k < modes; ++k) {
      std::complex<double>* v = &coeffs_[k * my];
      const double off = off_[k];
      v[0] /= diag_[k * my];
      for (int j = 1; j < my; ++j) v[j] = (v[j] - off * v[j - 1]) / diag_[k * my + j];
      for (int j = my - 2; j >= 0; --j) v[j] -= upper_[k * my + j] * v[j + 1];
    }
    std::vector<std::complex<double>> row(modes);
    for (int j = 0; j < my; ++j) {
      for (int k = 0; k < modes; ++k) row[k] = coeffs_[k * my + j];
      auto w = fft_.inverse(row);
      std::copy(w.begin(), w.end(), z.begin() + static_cast<std::ptrdiff_t>(j) * nx);
    }
  }

  void pcg(std::span<const double> b, std::vector<double>& x, SolveStats& stats) {
    const std::size_t m = b.size();
    const double bnorm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    const int cap = static_cast<int>(10.0 * std::sqrt(static_cast<double>(g_.node_count())));
    constexpr double tol = 1e-10;
    if (bnorm == 0.0) {
      std::fill(x.begin(), x.end(), 0.0);
      return;
    }
    std::vector<double> r(m), z(m), p(m), q(m);
    apply(x, q);
    for (std::size_t n = 0; n < m; ++n) r[n] = b[n] - q[n];
    double rnorm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
    stats.history.push_back(rnorm / bnorm);
    precondition(r, z);
    p = z;
    double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    int it = 0;
    while (rnorm / bnorm > tol) {
      if (it >= cap) {
        std::string hist;
        for (double h : stats.history) hist += " " + std::to_string(h);
        throw NumericError("pressure solve did not converge in " + std::to_string(cap) +
                           " iterations; residual history:" + hist);
      }
      apply(p, q);
      const double alpha = rz / std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
      for (std::size_t n = 0; n < m; ++n) {
        x[n] += alpha * p[n];
        r[n] -= alpha * q[n];
      }
      rnorm = std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0));
      stats.history.push_back(rnorm / bnorm);
      ++it;
      if (rnorm / bnorm <= tol) break;
      precondition(r, z);
      const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t n = 0; n < m; ++n) p[n] = z[n] + beta * p[n];
    }
    stats.iterations = it;
    stats.relative_residual = rnorm / bnorm;
  }

  StripGrid g_;
  RealFFT fft_;
  std::vector<double> stencil_;
  double dbar_ = 1.0;
  std::vector<double> diag_, upper_, off_;
  std::vector<std::complex<double>> coeffs_;
};

/// Pressure with inward bottom flux a(t) and zero on the free boundary.
inline ScalarField2D solve_pressure(const InterfaceState& s, PressureSolver& solver,
                                    std::span<const double> warm = {}) {
  validate_state(s);
  detail::require(solver.grid() == s.grid, "solve_pressure: solver grid mismatch");
  const std::vector<double> flux(s.grid.nx(), s.a(s.t)), top(s.grid.nx(), 0.0);
  return solver.solve(s.gamma, s.H, flux, top, warm);
}

inline ScalarField2D solve_pressure(const InterfaceState& s) {
  PressureSolver solver(s.grid);
  return solve_pressure(s, solver);
}

/// |Du| on the free boundary from the one-sided second-order derivative along the
/// mapped vertical: |Du| = |U_y| sqrt(1 + gamma'^2) / D.
inline std::vector<double> boundary_gradient(const ScalarField2D& u) {
  const auto& g = u.grid;
  const int nx = g.nx(), ny = g.ny();
  const auto dg = periodic_derivative(g.horizontal(), u.gamma);
  std::vector<double> out(nx);
  for (int i = 0; i < nx; ++i) {
    const double uy =
        (3.0 * u.at(i, ny - 1) - 4.0 * u.at(i, ny - 2) + u.at(i, ny - 3)) / (2.0 * g.hy());
    out[i] = std::abs(uy) * std::sqrt(1.0 + dg[i] * dg[i]) / (u.gamma[i] + u.H);
  }
  return out;
}

} // namespace hsflat

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hsflat/core/error.hpp"

namespace hsflat {

// ---------------------------------------------------------------- barrier

struct BarrierGeometry {
  double r = 0.02;
  int n = 2;
  double p = 0.0;
  double R = 0.0;

  BarrierGeometry(double r_, int n_ = 2, double r0 = 0.05) : r(r_), n(n_) {
    detail::require(r > 0.0 && r < r0, "BarrierGeometry: r must lie in (0, r0)");
    detail::require(n == 2 || n == 3, "BarrierGeometry: dimension must be 2 or 3");
    p = 1.0 / (8.0 * r) - r / 2.0;
    R = 1.0 / (8.0 * r) + r / 2.0;
  }

  /// |(-r e_n) - p e_n| - R and |(x', 0) - p e_n| - R with |x'| = 1/2.
  [[nodiscard]] std::array<double, 2> membership_residuals() const {
    return {std::abs(-r - p) - R, std::hypot(0.5, p) - R};
  }

  [[nodiscard]] double f(double rho) const { return n == 2 ? -std::log(rho) : 1.0 / rho; }
  [[nodiscard]] double fprime(double rho) const { return n == 2 ? -1.0 / rho : -1.0 / (rho * rho); }
  [[nodiscard]] double amplitude() const {
    return (1.0 / 16.0 - r) / (f(R - 1.0 / 16.0) - f(R));
  }

  /// Radial comparison function U(x) for x = (x', x_n), |x'| given.
  [[nodiscard]] double U(double xp, double xn) const {
    return amplitude() * (f(std::hypot(xp, xn - p)) - f(R));
  }

  /// d_n U on the sphere |x - p e_n| = R at height x_n.
  [[nodiscard]] double dnU_on_sphere(double xn) const {
    return amplitude() * fprime(R) * (xn - p) / R;
  }
};

struct BarrierReport {
  double minimum = 0.0;
  double fitted_C = 0.0;  // (1 - minimum) / r
  double argmin_xn = 0.0;
};

/// Minimum of d_n U over the lower cap of the sphere on an angular lattice.
inline BarrierReport barrier_lower_bound(const BarrierGeometry& g, int samples = 20001) {
  BarrierReport rep;
  rep.minimum = std::numeric_limits<double>::infinity();
  // Cap: angles from the south pole up to where x_n = 0.
  const double theta_max = std::acos(g.p / g.R);
  for (int k = 0; k < samples; ++k) {
    const double th = theta_max * k / (samples - 1);
    const double xn = g.p - g.R * std::cos(th);
    const double v = g.dnU_on_sphere(xn);
    if (v < rep.minimum) {
      rep.minimum = v;
      rep.argmin_xn = xn;
    }
  }
  rep.fitted_C = (1.0 - rep.minimum) / g.r;
  return rep;
}

// ---------------------------------------------------------------- sampled fields

/// Values on a uniform box lattice with Keys cubic convolution interpolation; NaN outside.
class Field2D {
public:
  Field2D() = default;
  Field2D(double x0, double y0, double h, int nx, int ny)
      : x0_(x0), y0_(y0), h_(h), nx_(nx), ny_(ny), v_(static_cast<std::size_t>(nx) * ny, 0.0) {
    detail::require(h > 0.0 && nx >= 4 && ny >= 4, "Field2D: bad lattice");
  }
  template <class F>
  static Field2D sample(double x0, double y0, double h, int nx, int ny, F&& fn) {
    Field2D f(x0, y0, h, nx, ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) f.at(i, j) = fn(f.x(i), f.y(j));
    return f;
  }

  [[nodiscard]] double x(int i) const { return x0_ + i * h_; }
  [[nodiscard]] double y(int j) const { return y0_ + j * h_; }
  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] double spacing() const { return h_; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(j) * nx_ + i]; }
  [[nodiscard]] double at(int i, int j) const { return v_[static_cast<std::size_t>(j) * nx_ + i]; }

  [[nodiscard]] bool inside(double x, double y) const {
    const double u = (x - x0_) / h_, w = (y - y0_) / h_;
    return u >= 1.0 && w >= 1.0 && u <= nx_ - 2.0 && w <= ny_ - 2.0;
  }

  [[nodiscard]] double operator()(double x, double y) const {
    if (!inside(x, y)) return std::numeric_limits<double>::quiet_NaN();
    const double u = (x - x0_) / h_, w = (y - y0_) / h_;
    int i = static_cast<int>(std::floor(u)), j = static_cast<int>(std::floor(w));
    i = std::min(i, nx_ - 3);
    j = std::min(j, ny_ - 3);
    const double fu = u - i, fw = w - j;
    double wu[4], ww[4];
    weights(fu, wu);
    weights(fw, ww);
    double acc = 0.0;
    for (int b = 0; b < 4; ++b) {
      double row = 0.0;
      for (int a = 0; a < 4; ++a) {
        const double val = at(i - 1 + a, j - 1 + b);
        if (std::isnan(val)) return val;
        row += wu[a] * val;
      }
      acc += ww[b] * row;
    }
    return acc;
  }

private:
  static void weights(double t, double* w) {
    // Keys kernel, a = -1/2, for offsets -1, 0, 1, 2.
    const double t2 = t * t, t3 = t2 * t;
    w[0] = -0.5 * t3 + t2 - 0.5 * t;
    w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
    w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    w[3] = 0.5 * t3 - 0.5 * t2;
  }

  double x0_ = 0.0, y0_ = 0.0, h_ = 1.0;
  int nx_ = 0, ny_ = 0;
  std::vector<double> v_;
};

// ---------------------------------------------------------------- Kelvin transform (n = 2)

using Point2 = std::array<double, 2>;  // (x', x_n)

/// Inversion about the sphere of radius rho centered at rho e_n followed by reflection in x_n = 0.
inline Point2 kelvin_phi(const Point2& x, double rho) {
  const double a = x[0], b = -x[1] + rho;  // (x - 2 x_n e_n) + rho e_n
  const double d2 = x[0] * x[0] + (x[1] - rho) * (x[1] - rho);
  return {rho * rho * a / d2, rho * rho * b / d2 - rho};
}

inline Point2 kelvin_phi_inv(const Point2& y, double rho) {
  const double a = y[0], b = -y[1] - rho;
  const double d2 = y[0] * y[0] + (y[1] + rho) * (y[1] + rho);
  return {rho * rho * a / d2, rho * rho * b / d2 + rho};
}

/// (|y + rho e_n| / rho) (|x - rho e_n| / rho) with y = Phi(x); equals 1.
inline double kelvin_identity(const Point2& x, double rho) {
  const auto y = kelvin_phi(x, rho);
  return std::hypot(y[0], y[1] + rho) / rho * std::hypot(x[0], x[1] - rho) / rho;
}

/// V~(y) = V(Phi^{-1}(y)); the conformal prefactor is 1 in two dimensions.
inline Field2D kelvin(const Field2D& V, double rho, const Field2D& target_lattice) {
  detail::require(rho > 0.0, "kelvin: rho must be positive");
  Field2D out = target_lattice;
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i) {
      const auto x = kelvin_phi_inv({out.x(i), out.y(j)}, rho);
      out.at(i, j) = V(x[0], x[1]);
    }
  return out;
}

// ---------------------------------------------------------------- conformal shear

template <int n>
using Mat = std::array<std::array<double, n>, n>;

template <int n>
Mat<n> matmul(const Mat<n>& a, const Mat<n>& b) {
  Mat<n> c{};
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// Matrix exponential by scaling and squaring with a Taylor series.
template <int n>
Mat<n> expm(Mat<n> a) {
  double norm = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  while (norm > 0.125) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& row : a)
    for (double& v : row) v *= scale;
  Mat<n> result{}, term{};
  for (int i = 0; i < n; ++i) result[i][i] = term[i][i] = 1.0;
  for (int k = 1; k <= 20; ++k) {
    term = matmul<n>(term, a);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = matmul<n>(result, result);
  return result;
}

/// M = p_n Id + e_n (x) p' - p' (x) e_n in two dimensions, p = (p_1, p_n).
inline Mat<2> shear_generator(const Point2& p) {
  return {{{p[1], -p[0]}, {p[0], p[1]}}};
}

/// V_p(y) = V(e^{eps M} y).
inline Field2D shear(const Field2D& V, const Point2& p, double eps, const Field2D& target_lattice) {
  auto M = shear_generator(p);
  double norm = 0.0;
  for (const auto& row : M) norm = std::max(norm, std::abs(row[0]) + std::abs(row[1]));
  detail::require(eps * norm <= 0.2, "shear: need |eps M| <= 0.2");
  for (auto& row : M)
    for (double& v : row) v *= eps;
  const auto E = expm<2>(M);
  Field2D out = target_lattice;
  for (int j = 0; j < out.ny(); ++j)
    for (int i = 0; i < out.nx(); ++i) {
      const double y0 = out.x(i), y1 = out.y(j);
      out.at(i, j) = V(E[0][0] * y0 + E[0][1] * y1, E[1][0] * y0 + E[1][1] * y1);
    }
  return out;
}

// ---------------------------------------------------------------- static hodograph

/// Solves V(x' , x_n - eps s) = x_n for s by bisection on [-s_max, s_max]; NaN if no bracket.
inline double static_hodograph(const std::function<double(double, double)>& V, double xp,
                               double xn, double eps, double s_max = 20.0) {
  auto phi = [&](double s) { return V(xp, xn - eps * s) - xn; };
  double lo = -s_max, hi = s_max;
  double flo = phi(lo), fhi = phi(hi);
  if (std::isnan(flo) || std::isnan(fhi) || flo * fhi > 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double fm = phi(mid);
    if (std::isnan(fm)) return fm;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Evaluation points of the half ball B_1^+ on a lattice of spacing h.
inline std::vector<Point2> half_ball_points(double h) {
  std::vector<Point2> pts;
  const int m = static_cast<int>(std::floor(1.0 / h + 1e-12));
  for (int j = 0; j <= m; ++j)
    for (int i = -m; i <= m; ++i) {
      const double x = i * h, y = j * h;
      if (x * x + y * y <= 1.0 + 1e-12) pts.push_back({x, y});
    }
  return pts;
}

struct DeformationReport {
  double discrepancy = 0.0;
  double N = 1.0;  // sup |v| + 1 on B_1^+
  double eps = 0.0;
  int masked = 0;
  Point2 witness{};
};

/// Kelvin comparison: v~ against v + B(|x'|^2 - x_n^2) on B_1^+ (n = 2).
inline DeformationReport verify_A6(const Field2D& V, double eps, double B, double h = 0.05) {
  detail::require(B > 0.0 && eps > 0.0, "verify_A6: need B, eps > 0");
  const double rho = 1.0 / (eps * B);
  detail::require(rho > 10.0, "verify_A6: Kelvin radius must exceed 10");
  auto Vt = [&](double y0, double y1) {
    const auto x = kelvin_phi_inv({y0, y1}, rho);
    return V(x[0], x[1]);
  };
  auto Vf = [&](double a, double b) { return V(a, b); };
  DeformationReport rep;
  rep.eps = eps;
  double vmax = 0.0;
  for (const auto& x : half_ball_points(h)) {
    const double v = static_hodograph(Vf, x[0], x[1], eps);
    const double vt = static_hodograph(Vt, x[0], x[1], eps);
    if (std::isnan(v) || std::isnan(vt)) {
      ++rep.masked;
      continue;
    }
    vmax = std::max(vmax, std::abs(v));
    const double d = std::abs(vt - (v + B * (x[0] * x[0] - x[1] * x[1])));
    if (d > rep.discrepancy) {
      rep.discrepancy = d;
      rep.witness = x;
    }
  }
  rep.N = vmax + 1.0;
  return rep;
}

/// Shear comparison: v_p against v + p.x on B_1^+.
inline DeformationReport verify_A7(const Field2D& V, const Point2& p, double eps, double h = 0.05) {
  auto M = shear_generator(p);
  for (auto& row : M)
    for (double& v : row) v *= eps;
  const auto E = expm<2>(M);
  auto Vp = [&](double y0, double y1) {
    return V(E[0][0] * y0 + E[0][1] * y1, E[1][0] * y0 + E[1][1] * y1);
  };
  auto Vf = [&](double a, double b) { return V(a, b); };
  DeformationReport rep;
  rep.eps = eps;
  double vmax = 0.0;
  for (const auto& x : half_ball_points(h)) {
    const double v = static_hodograph(Vf, x[0], x[1], eps);
    const double vp = static_hodograph(Vp, x[0], x[1], eps);
    if (std::isnan(v) || std::isnan(vp)) {
      ++rep.masked;
      continue;
    }
    vmax = std::max(vmax, std::abs(v));
    const double d = std::abs(vp - (v + p[0] * x[0] + p[1] * x[1]));
    if (d > rep.discrepancy) {
      rep.discrepancy = d;
      rep.witness = x;
    }
  }
  rep.N = vmax + 1.0;
  return rep;
}

} // namespace hsflat

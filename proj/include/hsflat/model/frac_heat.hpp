#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "hsflat/core/fft.hpp"
#include "hsflat/core/grid.hpp"
#include "hsflat/model/schedule.hpp"

namespace hsflat {

/// Normalized Fourier coefficients c_k = (1/n) sum_j w_j exp(-i kappa_k x_j), k = -n/2..n/2-1.
struct SpectralCoeffs {
  PeriodicGrid1D grid;
  std::vector<std::complex<double>> c;  // c[k + n/2]

  [[nodiscard]] std::complex<double> operator()(int k) const { return c[k + grid.size() / 2]; }
};

inline SpectralCoeffs spectral(const PeriodicGrid1D& g, std::span<const double> w) {
  RealFFT fft(g.size());
  const auto half = fft.forward(w);
  const int n = g.size();
  SpectralCoeffs s{g, std::vector<std::complex<double>>(n)};
  for (int k = -n / 2; k < n / 2; ++k) {
    const auto v = k >= 0 ? half[k] : std::conj(half[-k]);
    s.c[k + n / 2] = v / static_cast<double>(n);
  }
  return s;
}

inline std::vector<double> from_spectral(const SpectralCoeffs& s) {
  const int n = s.grid.size();
  RealFFT fft(n);
  std::vector<std::complex<double>> half(n / 2 + 1);
  for (int k = 0; k < n / 2; ++k) half[k] = s(k) * static_cast<double>(n);
  half[n / 2] = s(-n / 2) * static_cast<double>(n);
  return fft.inverse(half);
}

/// Applies the real radial symbol m(|kappa|) to a periodic sample.
template <class Symbol>
std::vector<double> apply_symbol(const PeriodicGrid1D& g, std::span<const double> w, Symbol&& m) {
  RealFFT fft(g.size());
  return fft.apply(w, [&](int k) { return m(g.wavenumber(k)); });
}

/// Symbol -|kappa|.
inline std::vector<double> half_laplacian(const PeriodicGrid1D& g, std::span<const double> w) {
  return apply_symbol(g, w, [](double kappa) { return -kappa; });
}

/// Finite-depth Dirichlet-to-Neumann map, symbol -kappa tanh(kappa L).
inline std::vector<double> dtn_strip(const PeriodicGrid1D& g, std::span<const double> w, double L) {
  detail::require(L > 0.0, "dtn_strip: depth must be positive");
  return apply_symbol(g, w, [L](double kappa) { return -kappa * std::tanh(kappa * L); });
}

/// Exact solution of w_t = a(t) half_laplacian(w) from t0 to t1.
inline std::vector<double> evolve_half_heat(const PeriodicGrid1D& g, std::span<const double> w0,
                                            const Schedule& a, double t0, double t1) {
  detail::require(t1 >= t0, "evolve_half_heat: need t1 >= t0");
  const double I = a.integral(t0, t1);
  return apply_symbol(g, w0, [I](double kappa) { return std::exp(-kappa * I); });
}

inline std::vector<double> evolve_half_heat(const PeriodicGrid1D& g, std::span<const double> w0,
                                            const Schedule& a, double T) {
  return evolve_half_heat(g, w0, a, 0.0, T);
}

/// log cosh without overflow.
inline double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

/// Linear evolution over a strip whose depth moves with the mean front,
/// w_t = a(t) DtN_{L(t)} w with dL/dt = a. Per mode the exact factor is
/// cosh(kappa L0) / cosh(kappa L1), whatever the schedule.
inline std::vector<double> evolve_moving_depth(const PeriodicGrid1D& g, std::span<const double> w0,
                                               double L0, double L1) {
  detail::require(L0 > 0.0 && L1 > 0.0, "evolve_moving_depth: depths must be positive");
  return apply_symbol(g, w0, [=](double kappa) {
    return std::exp(log_cosh(kappa * L0) - log_cosh(kappa * L1));
  });
}

struct ExtensionReport {
  double max_discrepancy = 0.0;
  std::vector<double> mode_discrepancy;  // per mode k = 0..n/2
  std::vector<double> normal_derivative;
};

/// Extends w harmonically into 0 < y < Y (spectral in x', second-order differences in y,
/// Robin condition U_y + |kappa| U = 0 on top) and compares the normal derivative at
/// y = 0 with half_laplacian(w).
inline ExtensionReport harmonic_extension_check(const PeriodicGrid1D& g, std::span<const double> w,
                                                double Y = 1.0, int ny = 4001) {
  detail::require(Y > 0.0 && ny >= 8, "harmonic_extension_check: bad strip");
  const int n = g.size(), modes = n / 2 + 1;
  RealFFT fft(n);
  const auto c = fft.forward(w);
  const double h = Y / (ny - 1);
  std::vector<std::complex<double>> dn(modes);
  ExtensionReport rep;
  rep.mode_discrepancy.assign(modes, 0.0);
  std::vector<double> sub(ny), diag(ny), sup(ny);
  std::vector<std::complex<double>> rhs(ny);
  for (int k = 0; k < modes; ++k) {
    const double kappa = g.wavenumber(k);
    // Unknowns U_1..U_{ny-1}; U_0 = c_k.
    const int m = ny - 1;
    for (int r = 0; r < m; ++r) {
      sub[r] = 1.0;
      sup[r] = 1.0;
      diag[r] = -2.0 - kappa * kappa * h * h;
      rhs[r] = 0.0;
    }
    rhs[0] -= c[k];
    // Top: ghost U_{m+1} = U_{m-1} - 2h kappa U_m.
    sub[m - 1] = 2.0;
    diag[m - 1] -= 2.0 * h * kappa;
    // Thomas.
    std::vector<std::complex<double>> U(m);
    std::vector<double> cp(m);
    cp[0] = sup[0] / diag[0];
    U[0] = rhs[0] / diag[0];
    for (int r = 1; r < m; ++r) {
      const double piv = diag[r] - sub[r] * cp[r - 1];
      cp[r] = sup[r] / piv;
      U[r] = (rhs[r] - sub[r] * U[r - 1]) / piv;
    }
    for (int r = m - 2; r >= 0; --r) U[r] -= cp[r] * U[r + 1];
    dn[k] = (-3.0 * c[k] + 4.0 * U[0] - U[1]) / (2.0 * h);
    const double scale = (k == 0 || 2 * k == n) ? 1.0 / n : 2.0 / n;
    rep.mode_discrepancy[k] = std::abs(dn[k] + kappa * c[k]) * scale;
  }
  rep.normal_derivative = fft.inverse(dn);
  const auto ref = half_laplacian(g, w);
  for (int i = 0; i < n; ++i)
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(rep.normal_derivative[i] - ref[i]));
  return rep;
}

} // namespace hsflat

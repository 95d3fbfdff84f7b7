#pragma once

#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "hsflat/core/error.hpp"

namespace hsflat {

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
} // namespace detail

/// Real-to-complex transform of fixed length n with unnormalized forward and
/// 1/n-normalized inverse. Plans use FFTW_ESTIMATE so results do not depend on timing.
class RealFFT {
public:
  explicit RealFFT(int n) : n_(n) {
    detail::require(n >= 2, "RealFFT: length must be >= 2");
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    cplx_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c_1d(n, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n, cplx_, real_, FFTW_ESTIMATE);
  }
  RealFFT(const RealFFT&) = delete;
  RealFFT& operator=(const RealFFT&) = delete;
  ~RealFFT() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    }
    fftw_free(real_);
    fftw_free(cplx_);
  }

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] int modes() const noexcept { return n_ / 2 + 1; }

  /// Coefficients c_k = sum_j w_j exp(-2 pi i jk/n), k = 0..n/2.
  std::vector<std::complex<double>> forward(std::span<const double> w) {
    detail::require(w.size() == static_cast<std::size_t>(n_), "RealFFT: size mismatch");
    std::memcpy(real_, w.data(), sizeof(double) * n_);
    fftw_execute(fwd_);
    std::vector<std::complex<double>> out(modes());
    for (int k = 0; k < modes(); ++k) out[k] = {cplx_[k][0], cplx_[k][1]};
    return out;
  }

  std::vector<double> inverse(std::span<const std::complex<double>> c) {
    detail::require(c.size() == static_cast<std::size_t>(modes()), "RealFFT: size mismatch");
    for (int k = 0; k < modes(); ++k) {
      cplx_[k][0] = c[k].real();
      cplx_[k][1] = c[k].imag();
    }
    fftw_execute(inv_);
    std::vector<double> out(real_, real_ + n_);
    for (double& x : out) x /= n_;
    return out;
  }

  /// Applies a real symbol m(k), k = 0..n/2, to a periodic field.
  template <class Symbol>
  std::vector<double> apply(std::span<const double> w, Symbol&& symbol) {
    auto c = forward(w);
    for (int k = 0; k < modes(); ++k) c[k] *= symbol(k);
    return inverse(c);
  }

private:
  int n_;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

} // namespace hsflat

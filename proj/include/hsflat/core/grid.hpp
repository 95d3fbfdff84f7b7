#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "hsflat/core/error.hpp"

namespace hsflat {

/// Uniform periodic lattice on [0, L). Node j sits at x = j*h.
class PeriodicGrid1D {
public:
  PeriodicGrid1D() = default;
  explicit PeriodicGrid1D(int n, double length = 2.0 * std::numbers::pi) : n_(n), length_(length) {
    detail::require(n >= 8, "PeriodicGrid1D: n_x must be >= 8, got " + std::to_string(n));
    detail::require((n & (n - 1)) == 0,
                    "PeriodicGrid1D: n_x must be a power of two, got " + std::to_string(n));
    detail::require(length > 0.0, "PeriodicGrid1D: length must be positive");
  }

  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] double spacing() const noexcept { return length_ / n_; }
  [[nodiscard]] double x(int j) const noexcept { return j * spacing(); }

  /// Angular wavenumber of integer mode k.
  [[nodiscard]] double wavenumber(int k) const noexcept {
    return 2.0 * std::numbers::pi * k / length_;
  }

  [[nodiscard]] int wrap(int j) const noexcept {
    const int r = j % n_;
    return r < 0 ? r + n_ : r;
  }

  /// Shortest signed periodic displacement from a to b.
  [[nodiscard]] double displacement(double a, double b) const noexcept {
    double d = std::fmod(b - a, length_);
    if (d > 0.5 * length_) d -= length_;
    if (d < -0.5 * length_) d += length_;
    return d;
  }

  friend bool operator==(const PeriodicGrid1D&, const PeriodicGrid1D&) = default;

private:
  int n_ = 8;
  double length_ = 2.0 * std::numbers::pi;
};

/// Horizontal periodic grid times a vertical lattice on the mapped
/// coordinate y in [0, 1]. Row 0 is the fixed bottom, row n_y-1 the free boundary.
class StripGrid {
public:
  StripGrid() = default;
  StripGrid(PeriodicGrid1D horizontal, int ny) : x_(horizontal), ny_(ny) {
    detail::require(ny >= 8, "StripGrid: n_y must be >= 8, got " + std::to_string(ny));
  }

  [[nodiscard]] const PeriodicGrid1D& horizontal() const noexcept { return x_; }
  [[nodiscard]] int nx() const noexcept { return x_.size(); }
  [[nodiscard]] int ny() const noexcept { return ny_; }
  [[nodiscard]] double hx() const noexcept { return x_.spacing(); }
  [[nodiscard]] double hy() const noexcept { return 1.0 / (ny_ - 1); }
  [[nodiscard]] double y(int j) const noexcept { return j * hy(); }
  [[nodiscard]] std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * nx() + i;
  }
  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(nx()) * ny_;
  }

  friend bool operator==(const StripGrid&, const StripGrid&) = default;

private:
  PeriodicGrid1D x_{};
  int ny_ = 8;
};

} // namespace hsflat

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hsflat/core/error.hpp"

namespace hsflat {

/// Piecewise-constant positive rate a(t): value values[i] on [starts[i], starts[i+1]),
/// the first value also applies before starts[0] and the last one forever after.
class Schedule {
public:
  Schedule() = default;
  explicit Schedule(double constant) : starts_{0.0}, values_{constant} { validate(); }
  Schedule(std::vector<double> starts, std::vector<double> values)
      : starts_(std::move(starts)), values_(std::move(values)) {
    validate();
  }

  [[nodiscard]] const std::vector<double>& starts() const noexcept { return starts_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

  [[nodiscard]] double operator()(double t) const noexcept {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    if (it == starts_.begin()) return values_.front();
    return values_[static_cast<std::size_t>(it - starts_.begin()) - 1];
  }

  /// Exact integral of a over [t0, t1] (negative if t1 < t0).
  [[nodiscard]] double integral(double t0, double t1) const noexcept {
    if (t1 < t0) return -integral(t1, t0);
    double acc = 0.0, cur = t0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const double end = i + 1 < starts_.size() ? starts_[i + 1] : t1;
      if (end <= cur) continue;
      const double stop = std::min(end, t1);
      acc += values_[i] * (stop - cur);
      cur = stop;
      if (cur >= t1) break;
    }
    return acc;
  }

  [[nodiscard]] double min() const { return *std::min_element(values_.begin(), values_.end()); }
  [[nodiscard]] double max() const { return *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const Schedule&, const Schedule&) = default;

private:
  void validate() const {
    detail::require(!values_.empty() && starts_.size() == values_.size(),
                    "Schedule: need one start time per value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      detail::require(values_[i] > 0.0, "Schedule: rates must be positive, got " +
                                            std::to_string(values_[i]));
      if (i) detail::require(starts_[i] > starts_[i - 1], "Schedule: start times must increase");
    }
  }

  std::vector<double> starts_{0.0};
  std::vector<double> values_{1.0};
};

} // namespace hsflat

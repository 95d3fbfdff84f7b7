#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hsflat/core/metric.hpp"
#include "hsflat/core/multivalued.hpp"

namespace hsflat {

struct SeminormReport {
  double alpha = 1.0;
  double truncation = 0.0;
  std::string region;
  double value = 0.0;
  ParabolicPoint witness_p{};
  ParabolicPoint witness_q{};
  std::size_t pairs = 0;
};

/// Truncated Hoelder seminorm sup |a-b| / d(p,q)^alpha over node pairs of the
/// region with d(p,q) > r. a, b range over the interval endpoints. Horizontal
/// separation is periodic.
inline SeminormReport trunc_holder(const MultiValuedSample& v, const Region& region, double alpha,
                                   double r) {
  detail::require(alpha > 0.0 && alpha <= 1.0, "trunc_holder: alpha must lie in (0,1]");
  detail::require(r >= 0.0, "trunc_holder: truncation radius must be >= 0");
  detail::require(!region.nodes.empty(), "trunc_holder: empty region");
  SeminormReport rep;
  rep.alpha = alpha;
  rep.truncation = r;
  rep.region = region.description;
  for (auto k : region.nodes) {
    if (v[k].empty()) {
      rep.value = std::numeric_limits<double>::infinity();
      rep.witness_p = rep.witness_q = v.point(k);
      return rep;
    }
  }
  const auto& nodes = region.nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ParabolicPoint p = v.point(nodes[i]);
    const Interval& a = v[nodes[i]];
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const Interval& b = v[nodes[j]];
      const double num = spread(a, b);
      if (num == 0.0) continue;
      const ParabolicPoint q = v.point(nodes[j]);
      const double d = metric_d_periodic(v.grid(), p, q);
      if (!(d > r)) continue;
      ++rep.pairs;
      const double val = num / std::pow(d, alpha);
      if (val > rep.value) {
        rep.value = val;
        rep.witness_p = p;
        rep.witness_q = q;
      }
    }
  }
  return rep;
}

inline SeminormReport trunc_holder(const MultiValuedSample& v, double alpha, double r) {
  return trunc_holder(v, region_all(v), alpha, r);
}

} // namespace hsflat

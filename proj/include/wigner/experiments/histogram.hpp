#pragma once

#include <wigner/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace wigner {

/// Either the sample range [min, max] or a fixed caller range.
struct RangePolicy {
  std::optional<std::pair<double, double>> fixed;

  static RangePolicy sample() { return {}; }
  static RangePolicy range(double lo, double hi) { return {std::make_pair(lo, hi)}; }
};

struct Histogram {
  std::vector<double> edges;      // bins + 1 increasing values
  std::vector<double> densities;  // normalized so sum density * width = 1 over in-range values
  std::vector<std::size_t> counts;
  std::size_t below = 0;  // values left of a fixed range
  std::size_t above = 0;  // values right of a fixed range

  std::size_t bins() const noexcept { return densities.size(); }
  double center(std::size_t b) const noexcept { return 0.5 * (edges[b] + edges[b + 1]); }
  double width(std::size_t b) const noexcept { return edges[b + 1] - edges[b]; }
};

/// Equal-width histogram. Bins are closed on the left except the last, which
/// also holds its right edge. A degenerate sample range (all values equal)
/// is widened to a unit interval centred on the value.
inline Histogram emit_histogram(std::span<const double> values, std::size_t bins, const RangePolicy& policy) {
  if (values.empty()) throw PreconditionError("emit_histogram: no values");
  if (bins < 1) throw PreconditionError("emit_histogram: need at least one bin");
  double lo, hi;
  if (policy.fixed) {
    std::tie(lo, hi) = *policy.fixed;
    if (!(lo < hi)) throw PreconditionError("emit_histogram: empty range");
  } else {
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    lo = *mn;
    hi = *mx;
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  Histogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  h.edges[bins] = hi;
  h.counts.assign(bins, 0);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : values) {
    if (x < lo) { ++h.below; continue; }
    if (x > hi) { ++h.above; continue; }
    auto b = static_cast<std::size_t>((x - lo) * scale);
    b = std::min(b, bins - 1);
    // Guard the floating-point bin index against the stored edges.
    while (b > 0 && x < h.edges[b]) --b;
    while (b + 1 < bins && x >= h.edges[b + 1]) ++b;
    ++h.counts[b];
  }
  const std::size_t inside = values.size() - h.below - h.above;
  h.densities.assign(bins, 0.0);
  if (inside > 0)
    for (std::size_t b = 0; b < bins; ++b)
      h.densities[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(inside) * h.width(b));
  return h;
}

}  // namespace wigner

#include "probe/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace probe {

double stable_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("stable_mean of empty range");
  const double anchor = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - anchor;
  return anchor + offset / static_cast<double>(values.size());
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of empty range");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double position = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(position));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = position - static_cast<double>(lo);
  if (frac == 0.0 || sorted[lo] == sorted[hi]) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval percentile_interval(std::span<const double> values, double coverage) {
  const double tail = (1.0 - coverage) / 2.0;
  return {percentile(values, tail), percentile(values, 1.0 - tail)};
}

}  // namespace probe

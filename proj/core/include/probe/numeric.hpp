#pragma once

#include <span>
#include <vector>

namespace probe {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Arithmetic mean accumulated as offsets from the first element, so a run of
/// identical values returns that value exactly.
double stable_mean(std::span<const double> values);

/// Linear-interpolation percentile (q in [0, 1]); the input is copied and sorted.
double percentile(std::span<const double> values, double q);

/// Central percentile interval at the given coverage (0.95 -> 2.5%/97.5%).
Interval percentile_interval(std::span<const double> values, double coverage = 0.95);

}  // namespace probe

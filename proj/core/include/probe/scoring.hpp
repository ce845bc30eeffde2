#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "probe/numeric.hpp"
#include "probe/ratings.hpp"

namespace probe {

/// Product-moment correlation, clamped to [-1, 1]. Requires equal lengths
/// >= 3 and nonzero variance in both inputs (NumericalError otherwise).
double pearson(std::span<const double> a, std::span<const double> b);
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// 2r / (1 + r).
double spearman_brown(double r);

enum class CeilingInterval { split_percentile, subject_bootstrap };

struct ReliabilityEstimate {
  double r_sb = 0.0;
  Interval ci;
  std::size_t n_splits = 0;
  std::uint64_t seed = 0;
  CeilingInterval ci_method = CeilingInterval::split_percentile;
};

const char* to_string(CeilingInterval method) noexcept;

/// Spearman-Brown corrected split-half reliability of group means.
///
/// Split s draws from its own stream (seed, s): every image's raters are
/// shuffled and cut in half, an odd surplus rater going to a uniformly chosen
/// half. Half means are correlated across images and corrected. The estimate
/// is the mean over splits; the interval is the 95% percentile interval over
/// splits, or over subject-bootstrap replicates when requested.
ReliabilityEstimate splithalf_reliability(
    const RatingsTable& table, std::size_t n_splits, std::uint64_t seed,
    std::size_t workers = 1, CeilingInterval ci_method = CeilingInterval::split_percentile);
ReliabilityEstimate splithalf_reliability(
    std::span<const std::vector<double>> pools, std::size_t n_splits, std::uint64_t seed,
    std::size_t workers = 1, CeilingInterval ci_method = CeilingInterval::split_percentile);

/// One split of a rater pool set; building block for the estimator above.
double splithalf_once(std::span<const std::vector<double>> pools, std::uint64_t seed,
                      std::uint64_t split_index);

inline constexpr double kEveAnomalyThreshold = 1.2;

/// r_pred^2 / r_sb^2. Not clipped at 1.
double explainable_variance(double r_pred, double r_sb);
double explainable_variance(double r_pred, const ReliabilityEstimate& ceiling);

struct LayerScore {
  std::string layer_name;
  std::size_t index = 0;  // extraction order
  double r_pearson = 0.0;
  double eve = 0.0;
  double lambda = 0.0;
  bool projected = false;

  bool anomalous() const noexcept { return eve > kEveAnomalyThreshold; }
};

/// Layer with the largest eve; ties go to the smallest extraction index.
const LayerScore& max_layer(std::span<const LayerScore> scores);

/// Held-out layer selection. Each split halves the images at random, picks
/// the layer with the highest correlation on one half (ties to the earlier
/// entry) and scores that layer on the other half.
struct SplitSelection {
  double eve = 0.0;  // mean held-out eve over splits
  Interval ci;       // 95% percentile interval over splits
  std::size_t n_splits = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> chosen;  // times each entry was selected
};

SplitSelection split_selection(std::span<const Eigen::VectorXd> predictions,
                               const Eigen::VectorXd& target, double r_sb, std::size_t n_splits,
                               std::uint64_t seed);

}  // namespace probe

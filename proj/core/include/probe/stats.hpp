#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "probe/numeric.hpp"
#include "probe/ratings.hpp"

namespace probe {

inline constexpr std::size_t kDefaultResamples = 1000;

struct BootstrapOptions {
  std::size_t n_resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  /// Splits used for the noise ceiling recomputed inside each resample.
  std::size_t ceiling_splits = 10;
  std::size_t workers = 1;
};

/// Fixed predictions of one model, aligned to the table's image order.
struct ModelPredictions {
  std::string model;
  Eigen::VectorXd values;
  std::vector<std::string> image_ids;  // optional; checked when present
};

/// A model's eve across resamples. `fingerprints[b]` identifies the
/// resampled subject pool of resample b, so paired comparisons can verify
/// both sides saw the same pools.
struct ScoreDistribution {
  std::string model;
  std::vector<double> eve;
  std::vector<std::uint64_t> fingerprints;
};

/// Resamples raters with replacement inside each image's pool, recomputes
/// group means and the noise ceiling on the resampled table, and rescores
/// every model's fixed predictions. All models share each resample.
std::vector<ScoreDistribution> bootstrap_scores(const RatingsTable& table,
                                                const std::vector<ModelPredictions>& models,
                                                const BootstrapOptions& options);

/// Model whose predictions are refit on every resample's group means.
struct RefitModel {
  std::string model;
  const Eigen::MatrixXd* features = nullptr;  // standardized
  double lambda = 0.0;
};

/// Same resampling as bootstrap_scores, but LOO ridge predictions are
/// recomputed against each resample's standardized group means.
std::vector<ScoreDistribution> bootstrap_scores_refit(const RatingsTable& table,
                                                      const std::vector<RefitModel>& models,
                                                      const BootstrapOptions& options);

struct BootstrapResult {
  double mean_diff = 0.0;
  Interval ci;
  double p_value = 1.0;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
};

/// Paired difference a - b per resample: mean, 2.5/97.5 percentile interval,
/// two-sided p = min(1, 2 min(frac <= 0, frac >= 0)) floored at 1/n.
BootstrapResult compare_models(const ScoreDistribution& a, const ScoreDistribution& b,
                               std::uint64_t seed = 0);

/// "0.067 [0.037, 0.096], p<0.001"
std::string render(const BootstrapResult& result);

}  // namespace probe

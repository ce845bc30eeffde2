#include "probe/stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "probe/error.hpp"
#include "probe/parallel.hpp"
#include "probe/regression.hpp"
#include "probe/rng.hpp"
#include "probe/scoring.hpp"

namespace probe {

namespace {

constexpr std::uint64_t kResampleStream = 0x52455341ULL;
constexpr std::uint64_t kResampleCeilingStream = 0x5243454cULL;

struct Resample {
  std::vector<std::vector<double>> pools;
  std::uint64_t fingerprint = 0;
};

Resample draw_resample(const RatingsTable& table, std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed ^ kResampleStream, index);
  Resample out;
  out.pools.resize(table.image_count());
  std::uint64_t fingerprint = mix64(seed ^ index);
  const auto& pools = table.pools();
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto& pool = pools[i];
    auto& drawn = out.pools[i];
    drawn.resize(pool.size());
    for (auto& value : drawn) {
      const auto pick = rng.below(pool.size());
      fingerprint = mix64(fingerprint ^ pick);
      value = pool[pick];
    }
  }
  out.fingerprint = fingerprint;
  return out;
}

double resample_ceiling(const Resample& resample, const BootstrapOptions& options,
                        std::uint64_t index) {
  const auto ceiling_seed = hash_counter(options.seed, kResampleCeilingStream, index);
  return splithalf_reliability(resample.pools, options.ceiling_splits, ceiling_seed, 1).r_sb;
}

void check_options(const BootstrapOptions& options) {
  if (options.n_resamples == 0) throw ConfigError("n_resamples must be at least 1");
  if (options.ceiling_splits == 0) throw ConfigError("ceiling_splits must be at least 1");
}

}  // namespace

std::vector<ScoreDistribution> bootstrap_scores(const RatingsTable& table,
                                                const std::vector<ModelPredictions>& models,
                                                const BootstrapOptions& options) {
  check_options(options);
  const auto n = static_cast<Eigen::Index>(table.image_count());
  for (const auto& model : models) {
    if (model.values.size() != n) {
      throw DataError("model '" + model.model + "' has " + std::to_string(model.values.size()) +
                      " predictions for " + std::to_string(n) + " images");
    }
    if (!model.image_ids.empty() && model.image_ids != table.image_ids()) {
      throw DataError("model '" + model.model + "' predictions are not in the ratings image order");
    }
    if (!model.values.allFinite()) throw DataError("model '" + model.model + "' has non-finite predictions");
  }

  std::vector<ScoreDistribution> out(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    out[m].model = models[m].model;
    out[m].eve.resize(options.n_resamples);
    out[m].fingerprints.resize(options.n_resamples);
  }

  parallel_for(options.n_resamples, options.workers, [&](std::size_t b) {
    const auto resample = draw_resample(table, options.seed, b);
    const Eigen::VectorXd means = pool_means(resample.pools);
    const double ceiling = resample_ceiling(resample, options, b);
    for (std::size_t m = 0; m < models.size(); ++m) {
      out[m].eve[b] = explainable_variance(pearson(models[m].values, means), ceiling);
      out[m].fingerprints[b] = resample.fingerprint;
    }
  });
  return out;
}

std::vector<ScoreDistribution> bootstrap_scores_refit(const RatingsTable& table,
                                                      const std::vector<RefitModel>& models,
                                                      const BootstrapOptions& options) {
  check_options(options);
  const auto n = static_cast<Eigen::Index>(table.image_count());
  std::vector<RidgeLoocv> solvers;
  solvers.reserve(models.size());
  for (const auto& model : models) {
    if (model.features == nullptr || model.features->rows() != n) {
      throw DataError("refit model '" + model.model + "' features are not aligned to the ratings");
    }
    solvers.emplace_back(*model.features, model.lambda);
  }

  std::vector<ScoreDistribution> out(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    out[m].model = models[m].model;
    out[m].eve.resize(options.n_resamples);
    out[m].fingerprints.resize(options.n_resamples);
  }

  parallel_for(options.n_resamples, options.workers, [&](std::size_t b) {
    const auto resample = draw_resample(table, options.seed, b);
    const Eigen::VectorXd means = pool_means(resample.pools);
    const Eigen::VectorXd target = standardize_vector(means);
    const double ceiling = resample_ceiling(resample, options, b);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto loo = solvers[m].predict(target);
      out[m].eve[b] = explainable_variance(pearson(loo.values, means), ceiling);
      out[m].fingerprints[b] = resample.fingerprint;
    }
  });
  return out;
}

BootstrapResult compare_models(const ScoreDistribution& a, const ScoreDistribution& b,
                               std::uint64_t seed) {
  if (a.eve.size() != b.eve.size()) {
    throw DataError("compare_models: distributions differ in length (" +
                    std::to_string(a.eve.size()) + " vs " + std::to_string(b.eve.size()) + ")");
  }
  if (a.eve.empty()) throw DataError("compare_models: empty distributions");
  if (!a.fingerprints.empty() && !b.fingerprints.empty() && a.fingerprints != b.fingerprints) {
    throw DataError("compare_models: '" + a.model + "' and '" + b.model +
                    "' were not scored on the same resamples");
  }

  const std::size_t count = a.eve.size();
  std::vector<double> diff(count);
  double total = 0.0;
  std::size_t at_most_zero = 0;
  std::size_t at_least_zero = 0;
  for (std::size_t i = 0; i < count; ++i) {
    diff[i] = a.eve[i] - b.eve[i];
    total += diff[i];
    at_most_zero += diff[i] <= 0.0 ? 1 : 0;
    at_least_zero += diff[i] >= 0.0 ? 1 : 0;
  }

  BootstrapResult result;
  result.n_resamples = count;
  result.seed = seed;
  result.mean_diff = total / static_cast<double>(count);
  result.ci = percentile_interval(diff, 0.95);
  const double tail = static_cast<double>(std::min(at_most_zero, at_least_zero)) /
                      static_cast<double>(count);
  result.p_value = std::max(std::min(1.0, 2.0 * tail), 1.0 / static_cast<double>(count));
  return result;
}

std::string render(const BootstrapResult& result) {
  char buffer[128];
  const double floor = 1.0 / static_cast<double>(std::max<std::size_t>(result.n_resamples, 1));
  if (result.p_value <= floor) {
    std::snprintf(buffer, sizeof buffer, "%.3f [%.3f, %.3f], p<%g", result.mean_diff,
                  result.ci.lower, result.ci.upper, floor);
  } else {
    std::snprintf(buffer, sizeof buffer, "%.3f [%.3f, %.3f], p=%.2g", result.mean_diff,
                  result.ci.lower, result.ci.upper, result.p_value);
  }
  return buffer;
}

}  // namespace probe

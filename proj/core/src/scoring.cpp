#include "probe/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "probe/error.hpp"
#include "probe/parallel.hpp"
#include "probe/rng.hpp"

namespace probe {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("pearson: length mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) throw DataError("pearson: need at least 3 observations");
  const double mean_a = stable_mean(a);
  const double mean_b = stable_mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw NumericalError("pearson: input has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return pearson(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                 std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

double spearman_brown(double r) {
  if (r <= -1.0) throw NumericalError("spearman_brown: correlation of -1 has no correction");
  return 2.0 * r / (1.0 + r);
}

const char* to_string(CeilingInterval method) noexcept {
  switch (method) {
    case CeilingInterval::split_percentile:
      return "split_percentile";
    case CeilingInterval::subject_bootstrap:
      return "subject_bootstrap";
  }
  return "unknown";
}

namespace {

// Separate streams for split draws and subject-bootstrap draws.
constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;
constexpr std::uint64_t kSelectionStream = 0x53454c4543ULL;
constexpr std::uint64_t kCeilingBootstrapStream = 0x43424f4f54ULL;

void check_pools(std::span<const std::vector<double>> pools) {
  if (pools.size() < 3) throw DataError("split-half reliability needs at least 3 images");
  for (std::size_t i = 0; i < pools.size(); ++i) {
    if (pools[i].size() < 2) {
      throw DataError("image " + std::to_string(i) + " has fewer than 2 raters");
    }
  }
}

double splithalf_with(std::span<const std::vector<double>> pools, Rng& rng) {
  std::vector<double> half_a(pools.size());
  std::vector<double> half_b(pools.size());
  std::vector<double> shuffled;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    shuffled.assign(pools[i].begin(), pools[i].end());
    for (std::size_t k = shuffled.size(); k > 1; --k) {
      std::swap(shuffled[k - 1], shuffled[rng.below(k)]);
    }
    std::size_t cut = shuffled.size() / 2;
    if (shuffled.size() % 2 == 1 && rng.coin()) ++cut;
    const std::span<const double> all(shuffled);
    half_a[i] = stable_mean(all.first(cut));
    half_b[i] = stable_mean(all.subspan(cut));
  }
  return spearman_brown(pearson(half_a, half_b));
}

}  // namespace

double splithalf_once(std::span<const std::vector<double>> pools, std::uint64_t seed,
                      std::uint64_t split_index) {
  check_pools(pools);
  Rng rng(seed ^ kSplitStream, split_index);
  return splithalf_with(pools, rng);
}

ReliabilityEstimate splithalf_reliability(std::span<const std::vector<double>> pools,
                                          std::size_t n_splits, std::uint64_t seed,
                                          std::size_t workers, CeilingInterval ci_method) {
  if (n_splits == 0) throw ConfigError("n_splits must be at least 1");
  check_pools(pools);

  std::vector<double> splits(n_splits);
  parallel_for(n_splits, workers, [&](std::size_t s) {
    Rng rng(seed ^ kSplitStream, s);
    splits[s] = splithalf_with(pools, rng);
  });

  ReliabilityEstimate estimate;
  estimate.n_splits = n_splits;
  estimate.seed = seed;
  estimate.ci_method = ci_method;
  double total = 0.0;
  for (double r : splits) total += r;
  estimate.r_sb = total / static_cast<double>(n_splits);

  if (ci_method == CeilingInterval::split_percentile) {
    estimate.ci = percentile_interval(splits, 0.95);
  } else {
    // Resample raters within each image, one split per replicate.
    std::vector<double> replicates(n_splits);
    parallel_for(n_splits, workers, [&](std::size_t b) {
      Rng rng(seed ^ kCeilingBootstrapStream, b);
      std::vector<std::vector<double>> resampled(pools.size());
      for (std::size_t i = 0; i < pools.size(); ++i) {
        const auto& pool = pools[i];
        resampled[i].resize(pool.size());
        for (auto& value : resampled[i]) value = pool[rng.below(pool.size())];
      }
      try {
        replicates[b] = splithalf_with(resampled, rng);
      } catch (const NumericalError&) {
        replicates[b] = std::numeric_limits<double>::quiet_NaN();
      }
    });
    std::erase_if(replicates, [](double r) { return std::isnan(r); });
    if (replicates.empty()) throw NumericalError("subject bootstrap of the ceiling failed");
    estimate.ci = percentile_interval(replicates, 0.95);
  }
  estimate.ci.lower = std::max(estimate.ci.lower, -1.0);
  estimate.ci.upper = std::min(estimate.ci.upper, 1.0);
  return estimate;
}

ReliabilityEstimate splithalf_reliability(const RatingsTable& table, std::size_t n_splits,
                                          std::uint64_t seed, std::size_t workers,
                                          CeilingInterval ci_method) {
  return splithalf_reliability(table.pools(), n_splits, seed, workers, ci_method);
}

double explainable_variance(double r_pred, double r_sb) {
  if (!(r_sb > 0.0)) {
    throw NumericalError("noise ceiling must be positive, got " + std::to_string(r_sb));
  }
  return (r_pred * r_pred) / (r_sb * r_sb);
}

double explainable_variance(double r_pred, const ReliabilityEstimate& ceiling) {
  return explainable_variance(r_pred, ceiling.r_sb);
}

const LayerScore& max_layer(std::span<const LayerScore> scores) {
  if (scores.empty()) throw DataError("max_layer: no layer scores");
  const LayerScore* best = &scores.front();
  for (const auto& score : scores) {
    if (score.eve > best->eve || (score.eve == best->eve && score.index < best->index)) {
      best = &score;
    }
  }
  return *best;
}

SplitSelection split_selection(std::span<const Eigen::VectorXd> predictions,
                               const Eigen::VectorXd& target, double r_sb, std::size_t n_splits,
                               std::uint64_t seed) {
  if (predictions.empty()) throw DataError("split_selection: no layers");
  if (n_splits == 0) throw ConfigError("selection splits must be at least 1");
  const auto n = static_cast<std::size_t>(target.size());
  if (n < 6) throw DataError("split_selection needs at least 6 images");
  for (const auto& p : predictions) {
    if (static_cast<std::size_t>(p.size()) != n) throw DataError("split_selection: length mismatch");
  }

  SplitSelection out;
  out.n_splits = n_splits;
  out.seed = seed;
  out.chosen.assign(predictions.size(), 0);
  std::vector<double> held_out(n_splits);
  std::vector<std::size_t> order(n);
  const std::size_t half = n / 2;
  std::vector<double> pick_target(half), eval_target(n - half);
  std::vector<double> pick_pred(half), eval_pred(n - half);
  for (std::size_t s = 0; s < n_splits; ++s) {
    Rng rng(seed ^ kSelectionStream, s);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
    for (std::size_t k = 0; k < half; ++k) pick_target[k] = target[static_cast<Eigen::Index>(order[k])];
    for (std::size_t k = half; k < n; ++k) {
      eval_target[k - half] = target[static_cast<Eigen::Index>(order[k])];
    }

    std::size_t best = 0;
    double best_r2 = -1.0;
    for (std::size_t l = 0; l < predictions.size(); ++l) {
      for (std::size_t k = 0; k < half; ++k) pick_pred[k] = predictions[l][static_cast<Eigen::Index>(order[k])];
      double r2 = 0.0;
      try {
        const double r = pearson(pick_pred, pick_target);
        r2 = r * r;
      } catch (const NumericalError&) {
        r2 = 0.0;
      }
      if (r2 > best_r2) {
        best_r2 = r2;
        best = l;
      }
    }
    ++out.chosen[best];
    for (std::size_t k = half; k < n; ++k) {
      eval_pred[k - half] = predictions[best][static_cast<Eigen::Index>(order[k])];
    }
    held_out[s] = explainable_variance(pearson(eval_pred, eval_target), r_sb);
  }
  out.eve = stable_mean(held_out);
  out.ci = percentile_interval(held_out, 0.95);
  return out;
}

}  // namespace probe

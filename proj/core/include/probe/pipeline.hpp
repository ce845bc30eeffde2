#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "probe/error.hpp"
#include "probe/feature_matrix.hpp"
#include "probe/manifest.hpp"
#include "probe/projection.hpp"
#include "probe/ratings.hpp"
#include "probe/regression.hpp"
#include "probe/scoring.hpp"
#include "probe/stats.hpp"
#include "probe/text.hpp"

namespace probe {

inline constexpr const char* kVersion = "probe 0.1.0";

enum class LayerSelection { max, split };

const char* to_string(LayerSelection mode) noexcept;

/// Run parameters. Defaults are the published settings; the seed has no
/// default and must be supplied.
struct RunConfig {
  double lambda = kDefaultLambda;
  double epsilon = kDefaultEpsilon;
  std::size_t projection_floor = kDefaultProjectionFloor;
  std::optional<std::uint64_t> seed;
  std::size_t n_splits = 1000;
  std::size_t n_resamples = kDefaultResamples;
  std::size_t ceiling_splits = 10;  // per bootstrap resample
  std::size_t workers = 1;
  std::size_t max_layers_in_flight = 0;  // 0: same as workers
  RatingScale scale{};
  CeilingInterval ceiling_ci = CeilingInterval::split_percentile;
  LayerSelection layer_selection = LayerSelection::max;
  std::size_t selection_splits = 100;  // split mode only
  bool skip_bad_layers = false;
  std::filesystem::path cache_dir;  // empty: no projection cache

  std::uint64_t require_seed() const;
};

/// Parses the JSON config. Unknown keys are rejected.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

struct LayerResult {
  LayerScore score;
  Eigen::VectorXd predictions;  // LOO predictions, standardized units
  LoocvDiagnostics diagnostics;
  std::size_t input_dim = 0;
  std::size_t fitted_dim = 0;
  std::size_t zero_variance_columns = 0;
};

struct LayerFailure {
  std::string layer_name;
  std::size_t index = 0;
  ErrorKind kind = ErrorKind::data;
  std::string message;
};

/// A layer to score. `load` is invoked on a worker thread.
struct LayerSource {
  std::string name;
  std::size_t index = 0;
  std::function<FeatureMatrix()> load;
};

struct ModelReport {
  std::string model_name;
  ReliabilityEstimate ceiling;
  std::vector<LayerResult> layers;  // extraction order, successful layers
  std::vector<LayerFailure> failures;
  std::optional<LayerScore> best;
  std::optional<SplitSelection> split_selection;  // LayerSelection::split only
  RunConfig config;
  std::vector<std::string> image_ids;
  std::size_t rating_count = 0;
  std::size_t subject_count = 0;
  std::string feature_notes;  // free-form provenance, e.g. vectorizer settings
  std::string version = kVersion;

  std::size_t layer_count() const noexcept { return layers.size() + failures.size(); }
};

/// Projects (when the plan says so, consulting the cache) and z-scores a
/// layer's columns. `projected` reports whether projection was applied.
Eigen::MatrixXd prepare_features(const FeatureMatrix& features, const RunConfig& config,
                                 bool* projected = nullptr,
                                 StandardizationParams* params = nullptr);

/// Scores one layer end to end: plan/apply projection, standardize, LOO
/// ridge, Pearson against the group means, eve against the ceiling.
LayerResult score_layer(const FeatureMatrix& features, const GroupRatings& ratings,
                        const ReliabilityEstimate& ceiling, const RunConfig& config,
                        std::size_t index);

/// Scores every source. Results and failures are ordered by extraction
/// index whatever the worker count.
ModelReport run_layers(const std::string& model_name, const std::vector<LayerSource>& sources,
                       const RatingsTable& ratings, const RunConfig& config);

ModelReport run_sweep(const LayerManifest& manifest, const RatingsTable& ratings,
                      const RunConfig& config);

/// Count-vectorizes captions and scores them as a single-layer model.
ModelReport run_captions(const std::string& model_name, const CaptionSet& captions,
                         const RatingsTable& ratings, const RunConfig& config,
                         std::size_t min_count = 1);

/// Loads every manifest layer and runs grid_search_lambda over them.
LambdaSearchResult run_lambda_search(const LayerManifest& manifest, const RatingsTable& ratings,
                                     const RunConfig& config, std::span<const double> grid);

/// Report JSON with a stable key order and no run-dependent fields.
std::string report_json(const ModelReport& report);
std::string report_csv(const ModelReport& report);
/// `layer_index\tlayer_name\teve` rows, unsmoothed.
std::string emit_plot_data(const ModelReport& report);

/// Writes report.json, report.csv, layers.tsv and predictions/layer_<index>.npy
/// into `out_dir`. Every file goes through a temporary and a rename.
void write_report(const std::filesystem::path& out_dir, const ModelReport& report);

/// Replaces `path` atomically with `contents`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Best-layer predictions persisted by a sweep.
struct StoredModel {
  std::string model_name;
  std::string best_layer;
  std::size_t best_index = 0;
  double best_eve = 0.0;
  std::vector<std::string> image_ids;
  Eigen::VectorXd predictions;
  std::filesystem::path directory;
};

StoredModel load_stored_model(const std::filesystem::path& sweep_dir);

struct ModelSummary {
  std::string model;
  double eve = 0.0;  // point estimate on the full table
  double mean = 0.0;
  Interval ci;
};

struct PairwiseComparison {
  std::string model_a;
  std::string model_b;
  BootstrapResult result;
};

struct ComparisonReport {
  std::vector<ModelSummary> models;
  std::vector<PairwiseComparison> pairs;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
  bool refit = false;  // regression refit on every resample
};

ComparisonReport run_compare(const RatingsTable& ratings, const std::vector<StoredModel>& models,
                             const RunConfig& config);
ComparisonReport summarize_comparison(const RatingsTable& ratings,
                                      const std::vector<ModelPredictions>& models,
                                      const std::vector<ScoreDistribution>& distributions,
                                      const RunConfig& config);

/// Table with columns model, mean, lower CI, upper CI, then one line per pair.
std::string render_comparison_table(const ComparisonReport& report);
std::string comparison_json(const ComparisonReport& report);

}  // namespace probe

#include "commands.hpp"

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "probe/error.hpp"
#include "probe/manifest.hpp"
#include "probe/parallel.hpp"
#include "probe/pipeline.hpp"
#include "probe/ratings.hpp"
#include "probe/scoring.hpp"
#include "probe/stats.hpp"
#include "probe/text.hpp"

namespace probe::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

RunConfig resolve_config(const CommonOptions& common) {
  RunConfig config = common.config.empty() ? RunConfig{} : load_run_config(common.config);
  if (common.seed) config.seed = common.seed;
  if (common.workers) config.workers = *common.workers;
  if (common.scale_min) config.scale.min = *common.scale_min;
  if (common.scale_max) config.scale.max = *common.scale_max;
  if (!(config.scale.min <= config.scale.max)) throw ConfigError("scale min exceeds max");
  config.require_seed();
  return config;
}

void emit(const std::filesystem::path& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_file_atomic(out, text);
}

int report_outcome(const ModelReport& report, const std::filesystem::path& dir, bool skip_bad) {
  std::cerr << report.model_name << ": " << report.layers.size() << " of " << report.layer_count()
            << " layers scored";
  if (report.best) {
    std::cerr << "; best '" << report.best->layer_name << "' eve=" << report.best->eve;
  }
  std::cerr << " -> " << dir.string() << '\n';
  for (const auto& failure : report.failures) {
    std::cerr << "  layer '" << failure.layer_name << "' failed (" << to_string(failure.kind)
              << "): " << failure.message << '\n';
  }
  if (report.failures.empty() || skip_bad) return 0;
  return exit_code(report.failures.front().kind);
}

}  // namespace

int run_sweep_command(const CommonOptions& common, const SweepOptions& options) {
  auto config = resolve_config(common);
  if (options.skip_bad_layers) config.skip_bad_layers = true;
  const auto ratings = load_ratings(options.ratings, config.scale);

  int status = 0;
  for (const auto& manifest_path : options.manifests) {
    const auto manifest = load_manifest(manifest_path);
    const auto report = run_sweep(manifest, ratings, config);
    const auto dir = options.manifests.size() == 1 ? options.out : options.out / manifest.model_name;
    write_report(dir, report);
    const int rc = report_outcome(report, dir, config.skip_bad_layers);
    if (status == 0) status = rc;
  }
  return status;
}

int run_reliability_command(const CommonOptions& common, const ReliabilityOptions& options) {
  auto config = resolve_config(common);
  if (options.splits) config.n_splits = *options.splits;
  const auto ratings = load_ratings(options.ratings, config.scale);
  const auto method = options.ci_method == "subject_bootstrap" ? CeilingInterval::subject_bootstrap
                                                               : CeilingInterval::split_percentile;
  const auto estimate = splithalf_reliability(ratings, config.n_splits, config.require_seed(),
                                              resolve_workers(config.workers), method);
  ordered_json doc = {{"r_sb", estimate.r_sb},
                      {"ci", {estimate.ci.lower, estimate.ci.upper}},
                      {"ci_method", to_string(estimate.ci_method)},
                      {"n_splits", estimate.n_splits},
                      {"seed", estimate.seed},
                      {"n_images", ratings.image_count()},
                      {"n_ratings", ratings.entries().size()},
                      {"n_subjects", ratings.subject_count()}};
  emit(options.out, doc.dump(2) + "\n");
  return 0;
}

int run_compare_command(const CommonOptions& common, const CompareOptions& options) {
  auto config = resolve_config(common);
  if (options.resamples) config.n_resamples = *options.resamples;
  const auto ratings = load_ratings(options.ratings, config.scale);

  std::vector<StoredModel> models;
  for (const auto& dir : options.preds) models.push_back(load_stored_model(dir));

  ComparisonReport report;
  if (!options.refit) {
    report = run_compare(ratings, models, config);
  } else {
    if (options.manifests.size() != models.size()) {
      throw ConfigError("--refit needs one --manifest per --preds directory");
    }
    std::vector<Eigen::MatrixXd> designs(models.size());
    std::vector<RefitModel> refit;
    std::vector<ModelPredictions> predictions;
    for (std::size_t m = 0; m < models.size(); ++m) {
      if (models[m].image_ids != ratings.image_ids()) {
        throw DataError("predictions in " + models[m].directory.string() +
                        " are not aligned with the ratings image order");
      }
      const auto manifest = load_manifest(options.manifests[m]);
      const LayerEntry* entry = nullptr;
      for (const auto& layer : manifest.layers) {
        if (layer.index == models[m].best_index) entry = &layer;
      }
      if (entry == nullptr) {
        throw DataError("manifest " + options.manifests[m].string() + " has no layer index " +
                        std::to_string(models[m].best_index));
      }
      designs[m] = prepare_features(load_layer(*entry, ratings.image_ids()), config);
      predictions.push_back({models[m].model_name, models[m].predictions, models[m].image_ids});
    }
    for (std::size_t m = 0; m < models.size(); ++m) {
      refit.push_back({models[m].model_name, &designs[m], config.lambda});
    }
    BootstrapOptions bootstrap;
    bootstrap.n_resamples = config.n_resamples;
    bootstrap.seed = config.require_seed();
    bootstrap.ceiling_splits = config.ceiling_splits;
    bootstrap.workers = resolve_workers(config.workers);
    const auto distributions = bootstrap_scores_refit(ratings, refit, bootstrap);
    report = summarize_comparison(ratings, predictions, distributions, config);
    report.refit = true;
  }

  const auto table = render_comparison_table(report);
  std::cout << table;
  if (!options.out.empty()) {
    std::filesystem::create_directories(options.out);
    write_file_atomic(options.out / "comparison.txt", table);
    write_file_atomic(options.out / "comparison.json", comparison_json(report));
  }
  return 0;
}

int run_captions_command(const CommonOptions& common, const CaptionsOptions& options) {
  const auto config = resolve_config(common);
  const auto ratings = load_ratings(options.ratings, config.scale);
  const auto captions = load_captions(options.captions);
  const auto report = run_captions(options.model_name, captions, ratings, config, options.min_count);
  write_report(options.out, report);
  return report_outcome(report, options.out, config.skip_bad_layers);
}

int run_lambda_search_command(const CommonOptions& common, const LambdaSearchOptions& options) {
  const auto config = resolve_config(common);
  const auto ratings = load_ratings(options.ratings, config.scale);
  const auto grid = options.grid.empty() ? default_lambda_grid() : options.grid;

  LayerManifest combined;
  for (const auto& path : options.manifests) {
    auto manifest = load_manifest(path);
    if (combined.model_name.empty()) combined.model_name = manifest.model_name;
    const std::size_t offset = combined.layers.size();
    for (auto& layer : manifest.layers) {
      layer.index += offset;
      combined.layers.push_back(std::move(layer));
    }
  }
  const auto result = run_lambda_search(combined, ratings, config, grid);

  ordered_json doc;
  doc["best_lambda"] = result.best;
  doc["grid"] = result.grid;
  doc["mean_error"] = result.mean_error;
  doc["selection"] = "minimum across-layer mean of ||y - yhat||_2";
  auto layers = ordered_json::array();
  for (std::size_t l = 0; l < combined.layers.size(); ++l) {
    layers.push_back({{"layer", combined.layers[l].name},
                      {"errors", result.layer_errors[l]},
                      {"best_lambda", result.per_layer_best[l]}});
  }
  doc["layers"] = std::move(layers);
  emit(options.out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace probe::cli

#include "probe/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "probe/error.hpp"
#include "probe/npy.hpp"
#include "probe/parallel.hpp"

namespace probe {

using ordered_json = nlohmann::ordered_json;

namespace {

const char* form_name(RidgeForm form) {
  switch (form) {
    case RidgeForm::primal:
      return "primal";
    case RidgeForm::dual:
      return "dual";
    case RidgeForm::automatic:
      return "automatic";
  }
  return "unknown";
}

std::string cache_file_name(const std::string& layer, std::size_t dim, std::uint64_t seed) {
  std::string safe = layer;
  for (auto& c : safe) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return safe + ".p" + std::to_string(dim) + ".s" + std::to_string(seed) + ".npy";
}

std::string predictions_file(std::size_t index) {
  return "predictions/layer_" + std::to_string(index) + ".npy";
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
T get_checked(const ordered_json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

ordered_json score_json(const LayerScore& score) {
  return {{"layer", score.layer_name},   {"index", score.index},
          {"r_pearson", score.r_pearson}, {"eve", score.eve},
          {"lambda", score.lambda},       {"projected", score.projected}};
}

ordered_json ceiling_json(const ReliabilityEstimate& ceiling) {
  return {{"r_sb", ceiling.r_sb},
          {"ci", {ceiling.ci.lower, ceiling.ci.upper}},
          {"ci_method", to_string(ceiling.ci_method)},
          {"n_splits", ceiling.n_splits},
          {"seed", ceiling.seed}};
}

ordered_json config_json(const RunConfig& config) {
  // No worker settings in the echo.
  ordered_json out = {{"lambda", config.lambda},
                      {"epsilon", config.epsilon},
                      {"projection_floor", config.projection_floor},
                      {"seed", config.require_seed()},
                      {"n_splits", config.n_splits},
                      {"n_resamples", config.n_resamples},
                      {"ceiling_splits", config.ceiling_splits},
                      {"scale", {config.scale.min, config.scale.max}},
                      {"ceiling_ci", to_string(config.ceiling_ci)},
                      {"layer_selection", to_string(config.layer_selection)},
                      {"selection_splits", config.selection_splits},
                      {"skip_bad_layers", config.skip_bad_layers}};
  if (!config.cache_dir.empty()) out["cache_dir"] = config.cache_dir.generic_string();
  return out;
}

}  // namespace

const char* to_string(LayerSelection mode) noexcept {
  return mode == LayerSelection::split ? "split" : "max";
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw ConfigError("a seed is required (set \"seed\" in the config or pass --seed)");
  return *seed;
}

RunConfig parse_run_config(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "lambda") {
      config.lambda = get_checked<double>(value, "lambda");
    } else if (key == "epsilon") {
      config.epsilon = get_checked<double>(value, "epsilon");
    } else if (key == "projection_floor") {
      config.projection_floor = get_checked<std::size_t>(value, "projection_floor");
    } else if (key == "seed") {
      if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                         value.get<std::int64_t>() < 0)) {
        throw ConfigError("config key 'seed' must be a non-negative integer");
      }
      config.seed = value.get<std::uint64_t>();
    } else if (key == "n_splits") {
      config.n_splits = get_checked<std::size_t>(value, "n_splits");
    } else if (key == "n_resamples") {
      config.n_resamples = get_checked<std::size_t>(value, "n_resamples");
    } else if (key == "ceiling_splits") {
      config.ceiling_splits = get_checked<std::size_t>(value, "ceiling_splits");
    } else if (key == "workers") {
      config.workers = get_checked<std::size_t>(value, "workers");
    } else if (key == "max_layers_in_flight") {
      config.max_layers_in_flight = get_checked<std::size_t>(value, "max_layers_in_flight");
    } else if (key == "scale") {
      const auto bounds = get_checked<std::vector<double>>(value, "scale");
      if (bounds.size() != 2) throw ConfigError("config key 'scale' must be [min, max]");
      config.scale = {bounds[0], bounds[1]};
    } else if (key == "ceiling_ci") {
      const auto method = get_checked<std::string>(value, "ceiling_ci");
      if (method == "split_percentile") {
        config.ceiling_ci = CeilingInterval::split_percentile;
      } else if (method == "subject_bootstrap") {
        config.ceiling_ci = CeilingInterval::subject_bootstrap;
      } else {
        throw ConfigError("ceiling_ci must be \"split_percentile\" or \"subject_bootstrap\"");
      }
    } else if (key == "layer_selection") {
      const auto mode = get_checked<std::string>(value, "layer_selection");
      if (mode == "max") {
        config.layer_selection = LayerSelection::max;
      } else if (mode == "split") {
        config.layer_selection = LayerSelection::split;
      } else {
        throw ConfigError("layer_selection must be \"max\" or \"split\"");
      }
    } else if (key == "selection_splits") {
      config.selection_splits = get_checked<std::size_t>(value, "selection_splits");
    } else if (key == "skip_bad_layers") {
      config.skip_bad_layers = get_checked<bool>(value, "skip_bad_layers");
    } else if (key == "cache_dir") {
      config.cache_dir = get_checked<std::string>(value, "cache_dir");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) throw ConfigError("lambda must be >= 0");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (config.n_splits == 0) throw ConfigError("n_splits must be at least 1");
  if (config.n_resamples == 0) throw ConfigError("n_resamples must be at least 1");
  if (config.ceiling_splits == 0) throw ConfigError("ceiling_splits must be at least 1");
  if (config.workers == 0) throw ConfigError("workers must be at least 1");
  if (config.selection_splits == 0) throw ConfigError("selection_splits must be at least 1");
  if (!(config.scale.min <= config.scale.max)) throw ConfigError("scale min exceeds max");
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_run_config(text);
}

Eigen::MatrixXd prepare_features(const FeatureMatrix& features, const RunConfig& config,
                                 bool* projected, StandardizationParams* params) {
  features.validate();
  const auto seed = config.require_seed();
  const auto plan = plan_projection(static_cast<std::size_t>(features.cols()),
                                    static_cast<std::size_t>(features.rows()), config.epsilon,
                                    seed, config.projection_floor);
  if (projected != nullptr) *projected = plan.apply;
  if (!plan.apply) return standardize_columns(features.data, params);

  std::filesystem::path cached;
  if (!config.cache_dir.empty()) {
    cached = config.cache_dir / cache_file_name(features.layer_name, plan.target_dim, seed);
    if (std::filesystem::exists(cached)) {
      auto hit = read_feature_array(cached, features.layer_name);
      if (hit.rows() != features.rows() ||
          static_cast<std::size_t>(hit.cols()) != plan.target_dim) {
        throw DataError("projection cache entry " + cached.string() + " has the wrong shape");
      }
      return standardize_columns(hit.data, params);
    }
  }

  const auto projection = SparseProjection::generate(plan.input_dim, plan.target_dim, seed);
  auto reduced = project(features, projection);
  if (!cached.empty()) {
    std::filesystem::create_directories(config.cache_dir);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = reduced.data;
    const std::size_t shape[2] = {static_cast<std::size_t>(row_major.rows()),
                                  static_cast<std::size_t>(row_major.cols())};
    write_file_atomic(cached, encode_npy(std::span<const double>(row_major.data(),
                                                                 static_cast<std::size_t>(row_major.size())),
                                         shape));
  }
  return standardize_columns(reduced.data, params);
}

LayerResult score_layer(const FeatureMatrix& features, const GroupRatings& ratings,
                        const ReliabilityEstimate& ceiling, const RunConfig& config,
                        std::size_t index) {
  if (features.rows() != ratings.values.size()) {
    throw DataError("layer '" + features.layer_name + "' has " + std::to_string(features.rows()) +
                    " rows, ratings have " + std::to_string(ratings.values.size()) + " images");
  }
  if (!features.image_ids.empty() && features.image_ids != ratings.image_ids) {
    throw DataError("layer '" + features.layer_name + "' rows are not in the ratings image order");
  }

  LayerResult result;
  result.input_dim = static_cast<std::size_t>(features.cols());
  bool projected = false;
  StandardizationParams params;
  const Eigen::MatrixXd design = prepare_features(features, config, &projected, &params);
  result.fitted_dim = static_cast<std::size_t>(design.cols());
  result.zero_variance_columns = params.zero_variance_count();

  const Eigen::VectorXd target = standardize_vector(ratings.values);
  const auto loo = ridge_loocv_predict(design, target, config.lambda);
  result.predictions = loo.values;
  result.diagnostics = loo.diagnostics;

  result.score.layer_name = features.layer_name;
  result.score.index = index;
  result.score.r_pearson = pearson(loo.values, ratings.values);
  result.score.eve = explainable_variance(result.score.r_pearson, ceiling);
  result.score.lambda = config.lambda;
  result.score.projected = projected;
  return result;
}

ModelReport run_layers(const std::string& model_name, const std::vector<LayerSource>& sources,
                       const RatingsTable& ratings, const RunConfig& config) {
  const auto seed = config.require_seed();
  const auto workers = resolve_workers(config.workers);
  const auto in_flight =
      config.max_layers_in_flight == 0 ? workers : std::min(workers, config.max_layers_in_flight);

  ModelReport report;
  report.model_name = model_name;
  report.config = config;
  report.image_ids = ratings.image_ids();
  report.rating_count = ratings.entries().size();
  report.subject_count = ratings.subject_count();
  report.ceiling = splithalf_reliability(ratings, config.n_splits, seed, workers, config.ceiling_ci);

  const auto group = group_average(ratings);
  std::vector<std::optional<LayerResult>> results(sources.size());
  std::vector<std::optional<LayerFailure>> failures(sources.size());

  parallel_for(sources.size(), in_flight, [&](std::size_t s) {
    const auto& source = sources[s];
    try {
      auto features = source.load();
      if (features.layer_name.empty()) features.layer_name = source.name;
      results[s] = score_layer(features, group, report.ceiling, config, source.index);
      results[s]->score.layer_name = source.name;
    } catch (const Error& e) {
      failures[s] = LayerFailure{source.name, source.index, e.kind(), e.what()};
    } catch (const std::exception& e) {
      failures[s] = LayerFailure{source.name, source.index, ErrorKind::data, e.what()};
    }
  });

  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (results[s]) report.layers.push_back(std::move(*results[s]));
    if (failures[s]) report.failures.push_back(std::move(*failures[s]));
  }
  std::sort(report.layers.begin(), report.layers.end(),
            [](const LayerResult& a, const LayerResult& b) { return a.score.index < b.score.index; });
  std::sort(report.failures.begin(), report.failures.end(),
            [](const LayerFailure& a, const LayerFailure& b) { return a.index < b.index; });

  if (!report.layers.empty()) {
    std::vector<LayerScore> scores;
    scores.reserve(report.layers.size());
    for (const auto& layer : report.layers) scores.push_back(layer.score);
    report.best = max_layer(scores);
    if (config.layer_selection == LayerSelection::split) {
      std::vector<Eigen::VectorXd> predictions;
      predictions.reserve(report.layers.size());
      for (const auto& layer : report.layers) predictions.push_back(layer.predictions);
      report.split_selection = split_selection(predictions, group.values, report.ceiling.r_sb,
                                               config.selection_splits, seed);
    }
  }
  return report;
}

ModelReport run_sweep(const LayerManifest& manifest, const RatingsTable& ratings,
                      const RunConfig& config) {
  std::vector<LayerSource> sources;
  sources.reserve(manifest.layers.size());
  const auto& ids = ratings.image_ids();
  for (const auto& entry : manifest.layers) {
    sources.push_back({entry.name, entry.index, [&entry, &ids] { return load_layer(entry, ids); }});
  }
  return run_layers(manifest.model_name, sources, ratings, config);
}

ModelReport run_captions(const std::string& model_name, const CaptionSet& captions,
                         const RatingsTable& ratings, const RunConfig& config,
                         std::size_t min_count) {
  captions.check_order(ratings.image_ids());
  auto vectors = count_vectorize(captions, min_count);
  const auto vocabulary_size = vectors.vocabulary.tokens.size();
  const auto total_tokens = vectors.vocabulary.total_tokens;
  auto shared = std::make_shared<FeatureMatrix>(std::move(vectors.features));
  std::vector<LayerSource> sources{
      {kCountVectorizerLayer, 0, [shared] { return *shared; }}};
  auto report = run_layers(model_name, sources, ratings, config);
  report.feature_notes = "count_vectorizer: raw counts; ASCII lowercase; split on non-alphanumeric; "
                         "min_count=" + std::to_string(min_count) +
                         "; vocabulary=" + std::to_string(vocabulary_size) +
                         "; tokens=" + std::to_string(total_tokens);
  return report;
}

LambdaSearchResult run_lambda_search(const LayerManifest& manifest, const RatingsTable& ratings,
                                     const RunConfig& config, std::span<const double> grid) {
  const auto group = group_average(ratings);
  const Eigen::VectorXd target = standardize_vector(group.values);
  std::vector<Standardized> layers(manifest.layers.size());
  const auto workers = resolve_workers(config.workers);
  parallel_for(manifest.layers.size(), workers, [&](std::size_t l) {
    const auto features = load_layer(manifest.layers[l], ratings.image_ids());
    layers[l].features = prepare_features(features, config, nullptr, &layers[l].params);
    layers[l].target = target;
  });
  return grid_search_lambda(layers, grid);
}

std::string report_json(const ModelReport& report) {
  ordered_json doc;
  doc["version"] = report.version;
  doc["model_name"] = report.model_name;
  doc["determinism"] = "bitwise: per-index RNG streams, results independent of worker count";
  doc["config"] = config_json(report.config);
  doc["data"] = {{"n_images", report.image_ids.size()},
                 {"n_ratings", report.rating_count},
                 {"n_subjects", report.subject_count}};
  doc["ceiling"] = ceiling_json(report.ceiling);
  doc["layer_count"] = report.layer_count();
  doc["best"] = report.best ? score_json(*report.best) : ordered_json(nullptr);
  ordered_json selection = {{"mode", to_string(report.config.layer_selection)}};
  if (report.split_selection) {
    const auto& split = *report.split_selection;
    auto chosen = ordered_json::array();
    for (std::size_t l = 0; l < split.chosen.size(); ++l) {
      if (split.chosen[l] > 0) {
        chosen.push_back({{"layer", report.layers[l].score.layer_name},
                          {"index", report.layers[l].score.index},
                          {"count", split.chosen[l]}});
      }
    }
    selection["description"] = "layer chosen on a random half of the images, scored on the other half";
    selection["eve"] = split.eve;
    selection["ci"] = {split.ci.lower, split.ci.upper};
    selection["n_splits"] = split.n_splits;
    selection["chosen"] = std::move(chosen);
  } else {
    selection["description"] = "plain maximum over leave-one-out layer scores";
  }
  doc["selection"] = std::move(selection);

  auto layers = ordered_json::array();
  for (const auto& layer : report.layers) {
    auto entry = score_json(layer.score);
    entry["anomalous"] = layer.score.anomalous();
    entry["input_dim"] = layer.input_dim;
    entry["fitted_dim"] = layer.fitted_dim;
    entry["zero_variance_columns"] = layer.zero_variance_columns;
    entry["diagnostics"] = {{"form", form_name(layer.diagnostics.form)},
                            {"condition_estimate", layer.diagnostics.condition_estimate},
                            {"min_leverage", layer.diagnostics.min_leverage},
                            {"max_leverage", layer.diagnostics.max_leverage}};
    entry["predictions_file"] = predictions_file(layer.score.index);
    layers.push_back(std::move(entry));
  }
  doc["layers"] = std::move(layers);

  auto errors = ordered_json::array();
  for (const auto& failure : report.failures) {
    errors.push_back({{"layer", failure.layer_name},
                      {"index", failure.index},
                      {"kind", to_string(failure.kind)},
                      {"message", failure.message}});
  }
  doc["errors"] = std::move(errors);
  doc["feature_notes"] = report.feature_notes;
  doc["smoothing"] = "none: per-layer scores are raw";
  doc["image_ids"] = report.image_ids;
  return doc.dump(2) + "\n";
}

std::string report_csv(const ModelReport& report) {
  std::ostringstream out;
  out << "layer_index,layer_name,r_pearson,eve,lambda,projected,input_dim,fitted_dim,best\n";
  out.precision(17);
  for (const auto& layer : report.layers) {
    const bool best = report.best && report.best->index == layer.score.index;
    out << layer.score.index << ',' << csv_field(layer.score.layer_name) << ','
        << layer.score.r_pearson << ',' << layer.score.eve << ',' << layer.score.lambda << ','
        << (layer.score.projected ? "true" : "false") << ',' << layer.input_dim << ','
        << layer.fitted_dim << ',' << (best ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string emit_plot_data(const ModelReport& report) {
  if (report.layer_count() == 0) throw DataError("report has no layers to plot");
  struct Row {
    std::size_t index;
    std::string name;
    std::string eve;
  };
  std::vector<Row> rows;
  char buffer[64];
  for (const auto& layer : report.layers) {
    std::snprintf(buffer, sizeof buffer, "%.17g", layer.score.eve);
    rows.push_back({layer.score.index, layer.score.layer_name, buffer});
  }
  for (const auto& failure : report.failures) rows.push_back({failure.index, failure.layer_name, "NA"});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.index < b.index; });

  std::string out = "layer_index\tlayer_name\teve\n";
  for (const auto& row : rows) {
    out += std::to_string(row.index) + '\t' + row.name + '\t' + row.eve + '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + temporary.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("failed writing " + temporary.string());
  }
  std::error_code ec;
  std::filesystem::rename(temporary, path, ec);
  if (ec) throw DataError("cannot move " + temporary.string() + " into place: " + ec.message());
}

void write_report(const std::filesystem::path& out_dir, const ModelReport& report) {
  std::filesystem::create_directories(out_dir / "predictions");
  for (const auto& layer : report.layers) {
    const std::size_t shape[1] = {static_cast<std::size_t>(layer.predictions.size())};
    write_file_atomic(out_dir / predictions_file(layer.score.index),
                      encode_npy(std::span<const double>(layer.predictions.data(),
                                                         static_cast<std::size_t>(layer.predictions.size())),
                                 shape));
  }
  if (report.layer_count() > 0) write_file_atomic(out_dir / "layers.tsv", emit_plot_data(report));
  write_file_atomic(out_dir / "report.csv", report_csv(report));
  // report.json last.
  write_file_atomic(out_dir / "report.json", report_json(report));
}

StoredModel load_stored_model(const std::filesystem::path& sweep_dir) {
  const auto report_path = sweep_dir / "report.json";
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw DataError("no report.json in " + sweep_dir.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

  StoredModel model;
  model.directory = sweep_dir;
  try {
    const auto doc = ordered_json::parse(text);
    model.model_name = doc.at("model_name").get<std::string>();
    model.image_ids = doc.at("image_ids").get<std::vector<std::string>>();
    const auto& best = doc.at("best");
    if (best.is_null()) throw DataError(report_path.string() + ": report has no best layer");
    model.best_layer = best.at("layer").get<std::string>();
    model.best_index = best.at("index").get<std::size_t>();
    model.best_eve = best.at("eve").get<double>();
    std::string file;
    for (const auto& layer : doc.at("layers")) {
      if (layer.at("index").get<std::size_t>() == model.best_index) {
        file = layer.at("predictions_file").get<std::string>();
      }
    }
    if (file.empty()) throw DataError(report_path.string() + ": best layer has no predictions entry");
    const auto path = sweep_dir / file;
    if (!std::filesystem::exists(path)) throw DataError("missing prediction file " + path.string());
    const auto array = read_npy(path);
    if (array.shape.size() != 1 || array.shape[0] != model.image_ids.size()) {
      throw DataError(path.string() + ": prediction vector does not match the report's image count");
    }
    model.predictions = Eigen::Map<const Eigen::VectorXd>(array.values.data(),
                                                          static_cast<Eigen::Index>(array.values.size()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(report_path.string() + ": " + e.what());
  }
  return model;
}

ComparisonReport summarize_comparison(const RatingsTable& ratings,
                                      const std::vector<ModelPredictions>& models,
                                      const std::vector<ScoreDistribution>& distributions,
                                      const RunConfig& config) {
  const auto seed = config.require_seed();
  ComparisonReport report;
  report.n_resamples = config.n_resamples;
  report.seed = seed;
  const auto ceiling = splithalf_reliability(ratings, config.n_splits, seed,
                                             resolve_workers(config.workers));
  const auto group = group_average(ratings);
  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelSummary summary;
    summary.model = models[m].model;
    summary.eve = explainable_variance(pearson(models[m].values, group.values), ceiling);
    const auto& eve = distributions[m].eve;
    double total = 0.0;
    for (double v : eve) total += v;
    summary.mean = total / static_cast<double>(eve.size());
    summary.ci = percentile_interval(eve, 0.95);
    report.models.push_back(summary);
  }
  for (std::size_t a = 0; a < distributions.size(); ++a) {
    for (std::size_t b = a + 1; b < distributions.size(); ++b) {
      report.pairs.push_back({distributions[a].model, distributions[b].model,
                              compare_models(distributions[a], distributions[b], seed)});
    }
  }
  return report;
}

ComparisonReport run_compare(const RatingsTable& ratings, const std::vector<StoredModel>& models,
                             const RunConfig& config) {
  if (models.size() < 2) throw ConfigError("compare needs at least two models");
  std::vector<ModelPredictions> predictions;
  for (const auto& model : models) {
    if (model.image_ids != ratings.image_ids()) {
      throw DataError("predictions in " + model.directory.string() +
                      " are not aligned with the ratings image order");
    }
    predictions.push_back({model.model_name, model.predictions, model.image_ids});
  }
  BootstrapOptions options;
  options.n_resamples = config.n_resamples;
  options.seed = config.require_seed();
  options.ceiling_splits = config.ceiling_splits;
  options.workers = resolve_workers(config.workers);
  const auto distributions = bootstrap_scores(ratings, predictions, options);
  return summarize_comparison(ratings, predictions, distributions, config);
}

std::string render_comparison_table(const ComparisonReport& report) {
  std::size_t width = 5;
  for (const auto& m : report.models) width = std::max(width, m.model.size());
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %8s  %8s  %8s\n", static_cast<int>(width), "model", "mean",
                "lower CI", "upper CI");
  out += line;
  for (const auto& m : report.models) {
    std::snprintf(line, sizeof line, "%-*s  %8.3f  %8.3f  %8.3f\n", static_cast<int>(width),
                  m.model.c_str(), m.mean, m.ci.lower, m.ci.upper);
    out += line;
  }
  if (!report.pairs.empty()) {
    out += "\n";
    for (const auto& pair : report.pairs) {
      out += pair.model_a + " - " + pair.model_b + ": " + render(pair.result) + "\n";
    }
  }
  return out;
}

std::string comparison_json(const ComparisonReport& report) {
  ordered_json doc;
  doc["version"] = kVersion;
  doc["n_resamples"] = report.n_resamples;
  doc["seed"] = report.seed;
  doc["resampling"] = report.refit
                          ? "raters resampled with replacement within each image; regression refit"
                          : "raters resampled with replacement within each image; predictions fixed";
  auto models = ordered_json::array();
  for (const auto& m : report.models) {
    models.push_back({{"model", m.model}, {"eve", m.eve}, {"mean", m.mean}, {"ci", {m.ci.lower, m.ci.upper}}});
  }
  doc["models"] = std::move(models);
  auto pairs = ordered_json::array();
  for (const auto& pair : report.pairs) {
    pairs.push_back({{"a", pair.model_a},
                     {"b", pair.model_b},
                     {"mean_diff", pair.result.mean_diff},
                     {"ci", {pair.result.ci.lower, pair.result.ci.upper}},
                     {"p_value", pair.result.p_value},
                     {"rendered", render(pair.result)}});
  }
  doc["pairs"] = std::move(pairs);
  return doc.dump(2) + "\n";
}

}  // namespace probe

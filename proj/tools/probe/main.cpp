#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "probe/error.hpp"

namespace {

void add_common(CLI::App& command, probe::cli::CommonOptions& common) {
  command.add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
  command.add_option("--seed", common.seed, "RNG seed (overrides the config)");
  command.add_option("--workers", common.workers, "Worker threads (PROBE_WORKERS overrides)")
      ->check(CLI::PositiveNumber);
  command.add_option("--scale-min", common.scale_min, "Lowest valid rating");
  command.add_option("--scale-max", common.scale_max, "Highest valid rating");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear probing of layer activations against group-average ratings"};
  app.require_subcommand(1);

  probe::cli::CommonOptions common;

  probe::cli::SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Score every layer of one or more models");
  add_common(*sweep_cmd, common);
  sweep_cmd->add_option("--manifest", sweep.manifests, "Layer manifest JSON (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--ratings", sweep.ratings, "Ratings CSV")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep.out, "Output directory")->required();
  sweep_cmd->add_flag("--skip-bad-layers", sweep.skip_bad_layers,
                      "Exit 0 even when some layers fail (failures stay in the report)");

  probe::cli::ReliabilityOptions reliability;
  auto* reliability_cmd = app.add_subcommand("reliability", "Split-half noise ceiling of the ratings");
  add_common(*reliability_cmd, common);
  reliability_cmd->add_option("--ratings", reliability.ratings, "Ratings CSV")
      ->required()
      ->check(CLI::ExistingFile);
  reliability_cmd->add_option("--splits", reliability.splits, "Number of random splits")
      ->check(CLI::PositiveNumber);
  reliability_cmd->add_option("--ci-method", reliability.ci_method, "Interval construction")
      ->check(CLI::IsMember({"split_percentile", "subject_bootstrap"}));
  reliability_cmd->add_option("--out", reliability.out, "Write the JSON here instead of stdout");

  probe::cli::CompareOptions compare;
  auto* compare_cmd = app.add_subcommand("compare", "Bootstrap comparison of swept models");
  add_common(*compare_cmd, common);
  compare_cmd->add_option("--preds", compare.preds, "Sweep output directories (two or more)")
      ->required()
      ->expected(2, -1);
  compare_cmd->add_option("--ratings", compare.ratings, "Ratings CSV")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--resamples", compare.resamples, "Bootstrap resamples")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--out", compare.out, "Directory for comparison.json and comparison.txt");
  compare_cmd->add_flag("--refit", compare.refit,
                        "Refit the best layer on every resample (small problems only)");
  compare_cmd->add_option("--manifest", compare.manifests,
                          "Manifests matching --preds, required with --refit");

  probe::cli::CaptionsOptions captions;
  auto* captions_cmd = app.add_subcommand("captions", "Count-vectorized caption baseline");
  add_common(*captions_cmd, common);
  captions_cmd->add_option("--captions", captions.captions, "Captions CSV")
      ->required()
      ->check(CLI::ExistingFile);
  captions_cmd->add_option("--ratings", captions.ratings, "Ratings CSV")->required()->check(CLI::ExistingFile);
  captions_cmd->add_option("--out", captions.out, "Output directory")->required();
  captions_cmd->add_option("--min-count", captions.min_count, "Minimum corpus count per token")
      ->check(CLI::PositiveNumber);
  captions_cmd->add_option("--model-name", captions.model_name, "Model name in the report");

  probe::cli::LambdaSearchOptions lambda;
  auto* lambda_cmd = app.add_subcommand("lambda-search", "Pick lambda on a calibration model");
  add_common(*lambda_cmd, common);
  lambda_cmd->add_option("--manifest", lambda.manifests, "Calibration manifest(s)")
      ->required()
      ->check(CLI::ExistingFile);
  lambda_cmd->add_option("--ratings", lambda.ratings, "Ratings CSV")->required()->check(CLI::ExistingFile);
  lambda_cmd->add_option("--grid", lambda.grid, "Strictly increasing lambda values");
  lambda_cmd->add_option("--out", lambda.out, "Write the JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*sweep_cmd) return probe::cli::run_sweep_command(common, sweep);
    if (*reliability_cmd) return probe::cli::run_reliability_command(common, reliability);
    if (*compare_cmd) return probe::cli::run_compare_command(common, compare);
    if (*captions_cmd) return probe::cli::run_captions_command(common, captions);
    if (*lambda_cmd) return probe::cli::run_lambda_search_command(common, lambda);
  } catch (const probe::Error& e) {
    std::cerr << "probe: " << probe::to_string(e.kind()) << " error: " << e.what() << '\n';
    return probe::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "probe: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace probe::cli {

/// Settings shared by every subcommand; flags override the config file.
struct CommonOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<double> scale_min;
  std::optional<double> scale_max;
};

struct SweepOptions {
  std::vector<std::filesystem::path> manifests;
  std::filesystem::path ratings;
  std::filesystem::path out;
  bool skip_bad_layers = false;
};

struct ReliabilityOptions {
  std::filesystem::path ratings;
  std::optional<std::size_t> splits;
  std::string ci_method = "split_percentile";
  std::filesystem::path out;
};

struct CompareOptions {
  std::vector<std::filesystem::path> preds;
  std::filesystem::path ratings;
  std::optional<std::size_t> resamples;
  std::filesystem::path out;
  bool refit = false;
  std::vector<std::filesystem::path> manifests;  // --refit only, one per --preds entry
};

struct CaptionsOptions {
  std::filesystem::path captions;
  std::filesystem::path ratings;
  std::filesystem::path out;
  std::size_t min_count = 1;
  std::string model_name = "captions_count_vectorizer";
};

struct LambdaSearchOptions {
  std::vector<std::filesystem::path> manifests;
  std::filesystem::path ratings;
  std::vector<double> grid;
  std::filesystem::path out;
};

int run_sweep_command(const CommonOptions& common, const SweepOptions& options);
int run_reliability_command(const CommonOptions& common, const ReliabilityOptions& options);
int run_compare_command(const CommonOptions& common, const CompareOptions& options);
int run_captions_command(const CommonOptions& common, const CaptionsOptions& options);
int run_lambda_search_command(const CommonOptions& common, const LambdaSearchOptions& options);

}  // namespace probe::cli

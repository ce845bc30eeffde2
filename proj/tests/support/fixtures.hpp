#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "oracles.hpp"
#include "probe/ratings.hpp"

namespace probe::testing {

inline std::filesystem::path data_dir() { return PROBE_TEST_DATA_DIR; }

/// Fresh, empty directory under the build tree's temp area.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("probe_tests_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline RatingsTable table_from(const std::vector<SyntheticRating>& rows, RatingScale scale) {
  std::vector<std::string> ids;
  std::vector<RatingEntry> entries;
  for (const auto& row : rows) {
    if (ids.empty() || ids.back() != row.image) ids.push_back(row.image);
    entries.push_back({ids.size() - 1, row.subject, row.rating});
  }
  return RatingsTable(std::move(ids), std::move(entries), scale);
}

inline std::string ratings_csv(const std::vector<SyntheticRating>& rows) {
  std::string out = "image_id,subject_id,rating\n";
  char buffer[64];
  for (const auto& row : rows) {
    std::snprintf(buffer, sizeof buffer, "%.17g", row.rating);
    out += row.image + "," + row.subject + "," + buffer + "\n";
  }
  return out;
}

inline constexpr RatingScale kWideScale{-1e6, 1e6};

}  // namespace probe::testing

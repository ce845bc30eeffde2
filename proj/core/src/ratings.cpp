#include "probe/ratings.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "probe/csv.hpp"
#include "probe/error.hpp"
#include "probe/numeric.hpp"

namespace probe {

namespace {

double parse_rating(const std::string& text, std::size_t line) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw DataError("ratings line " + std::to_string(line) + ": malformed rating '" + text + "'");
  }
  return value;
}

}  // namespace

RatingsTable::RatingsTable(std::vector<std::string> image_ids, std::vector<RatingEntry> entries,
                           RatingScale scale)
    : image_ids_(std::move(image_ids)), entries_(std::move(entries)), scale_(scale) {
  if (!(scale_.min <= scale_.max)) throw ConfigError("rating scale min exceeds max");
  if (image_ids_.empty()) throw DataError("ratings table has no images");

  std::unordered_set<std::string> unique_ids(image_ids_.begin(), image_ids_.end());
  if (unique_ids.size() != image_ids_.size()) throw DataError("duplicate image id in image order");

  pools_.assign(image_ids_.size(), {});
  std::vector<std::unordered_set<std::string>> seen(image_ids_.size());
  for (const auto& entry : entries_) {
    if (entry.image >= image_ids_.size()) throw DataError("rating refers to unknown image index");
    const auto& id = image_ids_[entry.image];
    if (!std::isfinite(entry.rating) || entry.rating < scale_.min || entry.rating > scale_.max) {
      throw DataError("rating " + std::to_string(entry.rating) + " for image '" + id +
                      "' outside scale [" + std::to_string(scale_.min) + ", " +
                      std::to_string(scale_.max) + "]");
    }
    if (!seen[entry.image].insert(entry.subject).second) {
      throw DataError("duplicate rating for (image '" + id + "', subject '" + entry.subject + "')");
    }
    pools_[entry.image].push_back(entry.rating);
  }
  for (std::size_t i = 0; i < pools_.size(); ++i) {
    if (pools_[i].size() < 2) {
      throw DataError("image '" + image_ids_[i] + "' has " + std::to_string(pools_[i].size()) +
                      " subject rating(s); split-half needs at least 2");
    }
  }
}

std::size_t RatingsTable::subject_count() const {
  std::set<std::string_view> subjects;
  for (const auto& entry : entries_) subjects.insert(entry.subject);
  return subjects.size();
}

RatingsTable parse_ratings(std::istream& in, RatingScale scale) {
  const auto records = read_csv(in);
  if (records.empty()) throw DataError("ratings file is empty");
  const auto& header = records.front().fields;
  if (header != std::vector<std::string>{"image_id", "subject_id", "rating"}) {
    throw DataError("ratings header must be exactly 'image_id,subject_id,rating'");
  }

  std::vector<std::string> image_ids;
  std::unordered_map<std::string, std::size_t> index_of;
  std::vector<RatingEntry> entries;
  entries.reserve(records.size() - 1);

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.fields.size() != 3) {
      throw DataError("ratings line " + std::to_string(record.line) + ": expected 3 fields, got " +
                      std::to_string(record.fields.size()));
    }
    const auto& image = record.fields[0];
    const auto& subject = record.fields[1];
    if (image.empty() || subject.empty()) {
      throw DataError("ratings line " + std::to_string(record.line) + ": empty identifier");
    }
    const double rating = parse_rating(record.fields[2], record.line);
    if (!std::isfinite(rating) || rating < scale.min || rating > scale.max) {
      throw DataError("ratings line " + std::to_string(record.line) + ": rating " +
                      record.fields[2] + " outside scale [" + std::to_string(scale.min) + ", " +
                      std::to_string(scale.max) + "]");
    }
    auto [it, inserted] = index_of.try_emplace(image, image_ids.size());
    if (inserted) image_ids.push_back(image);
    entries.push_back({it->second, subject, rating});
  }
  return RatingsTable(std::move(image_ids), std::move(entries), scale);
}

RatingsTable load_ratings(const std::filesystem::path& path, RatingScale scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open ratings file " + path.string());
  return parse_ratings(in, scale);
}

Eigen::VectorXd pool_means(std::span<const std::vector<double>> pools) {
  Eigen::VectorXd means(static_cast<Eigen::Index>(pools.size()));
  for (std::size_t i = 0; i < pools.size(); ++i) {
    means[static_cast<Eigen::Index>(i)] = stable_mean(pools[i]);
  }
  return means;
}

GroupRatings group_average(const RatingsTable& table) {
  return {table.image_ids(), pool_means(table.pools())};
}

}  // namespace probe

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace probe {

struct RatingScale {
  double min = 1.0;
  double max = 7.0;
};

struct RatingEntry {
  std::size_t image = 0;  // index into RatingsTable::image_ids()
  std::string subject;
  double rating = 0.0;
};

/// Per-subject ratings in long form. The image order (first appearance in the
/// source file) is the canonical order for every other artifact of a run.
///
/// Construction validates: ratings within scale, no duplicate
/// (image, subject) pairs, at least two subjects per image.
class RatingsTable {
 public:
  RatingsTable(std::vector<std::string> image_ids, std::vector<RatingEntry> entries,
               RatingScale scale);

  const std::vector<std::string>& image_ids() const noexcept { return image_ids_; }
  const std::vector<RatingEntry>& entries() const noexcept { return entries_; }
  RatingScale scale() const noexcept { return scale_; }
  std::size_t image_count() const noexcept { return image_ids_.size(); }

  /// Ratings of each image, in file order.
  const std::vector<std::vector<double>>& pools() const noexcept { return pools_; }

  std::size_t subject_count() const;

 private:
  std::vector<std::string> image_ids_;
  std::vector<RatingEntry> entries_;
  RatingScale scale_;
  std::vector<std::vector<double>> pools_;
};

struct GroupRatings {
  std::vector<std::string> image_ids;
  Eigen::VectorXd values;
};

/// Parses `image_id,subject_id,rating` CSV. Errors carry the offending line.
RatingsTable parse_ratings(std::istream& in, RatingScale scale);
RatingsTable load_ratings(const std::filesystem::path& path, RatingScale scale);

GroupRatings group_average(const RatingsTable& table);

/// Group means of arbitrary rater pools (used for resampled pools too).
Eigen::VectorXd pool_means(std::span<const std::vector<double>> pools);

}  // namespace probe

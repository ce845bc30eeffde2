#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "probe/feature_matrix.hpp"

namespace probe {

struct Caption {
  std::string image_id;
  std::string text;
};

/// One nonempty caption per image, in canonical image order.
class CaptionSet {
 public:
  explicit CaptionSet(std::vector<Caption> captions);

  const std::vector<Caption>& captions() const noexcept { return captions_; }
  std::size_t size() const noexcept { return captions_.size(); }
  std::vector<std::string> image_ids() const;

  /// Throws DataError unless the ids equal `canonical` element for element.
  void check_order(const std::vector<std::string>& canonical) const;

 private:
  std::vector<Caption> captions_;
};

/// Parses `image_id,caption` CSV (quoted captions may contain commas).
CaptionSet parse_captions(std::istream& in);
CaptionSet load_captions(const std::filesystem::path& path);

/// ASCII lowercase, split on runs of non-alphanumeric ASCII. Bytes >= 0x80
/// count as token characters, so UTF-8 words stay intact.
std::vector<std::string> tokenize(std::string_view caption);

struct Vocabulary {
  std::vector<std::string> tokens;  // unique, sorted bytewise
  std::size_t min_count = 1;
  std::size_t total_tokens = 0;     // corpus tokens kept after thresholding

  /// Column of `token`, or tokens.size() when absent.
  std::size_t find(std::string_view token) const;
};

struct CountVectors {
  FeatureMatrix features;  // raw counts, columns in vocabulary order
  Vocabulary vocabulary;
};

inline constexpr const char* kCountVectorizerLayer = "count_vectorizer";

/// Raw token counts. Tokens occurring fewer than min_count times across the
/// corpus are dropped; DataError if nothing survives.
CountVectors count_vectorize(const CaptionSet& captions, std::size_t min_count = 1);

}  // namespace probe

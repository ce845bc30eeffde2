#include "probe/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "probe/csv.hpp"
#include "probe/error.hpp"

namespace probe {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

CaptionSet::CaptionSet(std::vector<Caption> captions) : captions_(std::move(captions)) {
  if (captions_.empty()) throw DataError("caption set is empty");
  std::unordered_set<std::string> seen;
  for (const auto& caption : captions_) {
    if (caption.image_id.empty()) throw DataError("caption with empty image id");
    if (caption.text.empty()) throw DataError("empty caption for image '" + caption.image_id + "'");
    if (!seen.insert(caption.image_id).second) {
      throw DataError("more than one caption for image '" + caption.image_id + "'");
    }
  }
}

std::vector<std::string> CaptionSet::image_ids() const {
  std::vector<std::string> ids;
  ids.reserve(captions_.size());
  for (const auto& caption : captions_) ids.push_back(caption.image_id);
  return ids;
}

void CaptionSet::check_order(const std::vector<std::string>& canonical) const {
  if (canonical.size() != captions_.size()) {
    throw DataError("captions cover " + std::to_string(captions_.size()) + " images, ratings " +
                    std::to_string(canonical.size()));
  }
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    if (captions_[i].image_id != canonical[i]) {
      throw DataError("caption row " + std::to_string(i + 1) + " is image '" +
                      captions_[i].image_id + "', ratings order expects '" + canonical[i] + "'");
    }
  }
}

CaptionSet parse_captions(std::istream& in) {
  const auto records = read_csv(in);
  if (records.empty()) throw DataError("captions file is empty");
  if (records.front().fields != std::vector<std::string>{"image_id", "caption"}) {
    throw DataError("captions header must be exactly 'image_id,caption'");
  }
  std::vector<Caption> captions;
  captions.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    if (fields.size() != 2) {
      throw DataError("captions line " + std::to_string(records[r].line) + ": expected 2 fields");
    }
    captions.push_back({fields[0], fields[1]});
  }
  return CaptionSet(std::move(captions));
}

CaptionSet load_captions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open captions file " + path.string());
  return parse_captions(in);
}

std::vector<std::string> tokenize(std::string_view caption) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : caption) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::size_t Vocabulary::find(std::string_view token) const {
  const auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
  if (it != tokens.end() && *it == token) return static_cast<std::size_t>(it - tokens.begin());
  return tokens.size();
}

CountVectors count_vectorize(const CaptionSet& captions, std::size_t min_count) {
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(captions.size());
  std::map<std::string, std::size_t, std::less<>> corpus_counts;
  for (const auto& caption : captions.captions()) {
    tokenized.push_back(tokenize(caption.text));
    for (const auto& token : tokenized.back()) ++corpus_counts[token];
  }

  CountVectors out;
  out.vocabulary.min_count = min_count;
  for (const auto& [token, count] : corpus_counts) {
    if (count >= min_count) {
      out.vocabulary.tokens.push_back(token);
      out.vocabulary.total_tokens += count;
    }
  }
  if (out.vocabulary.tokens.empty()) {
    throw DataError("vocabulary is empty after applying min_count " + std::to_string(min_count));
  }

  const auto n = static_cast<Eigen::Index>(captions.size());
  const auto vocab_size = static_cast<Eigen::Index>(out.vocabulary.tokens.size());
  out.features.data = Eigen::MatrixXd::Zero(n, vocab_size);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& token : tokenized[static_cast<std::size_t>(i)]) {
      const auto column = out.vocabulary.find(token);
      if (column < out.vocabulary.tokens.size()) {
        out.features.data(i, static_cast<Eigen::Index>(column)) += 1.0;
      }
    }
  }
  out.features.image_ids = captions.image_ids();
  out.features.layer_name = kCountVectorizerLayer;
  return out;
}

}  // namespace probe

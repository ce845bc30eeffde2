#include "probe/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

#include "probe/error.hpp"
#include "probe/npy.hpp"

namespace probe {

using nlohmann::json;

LayerManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }

  LayerManifest manifest;
  try {
    manifest.model_name = doc.at("model_name").get<std::string>();
    const auto& layers = doc.at("layers");
    if (!layers.is_array() || layers.empty()) throw DataError("manifest has no layers");
    std::set<std::size_t> indices;
    std::set<std::string> names;
    for (const auto& item : layers) {
      LayerEntry entry;
      entry.name = item.at("name").get<std::string>();
      entry.path = item.at("path").get<std::string>();
      if (entry.path.is_relative() && !base_dir.empty()) entry.path = base_dir / entry.path;
      entry.shape = item.at("shape").get<std::vector<std::size_t>>();
      entry.flat_dim = item.at("flat_dim").get<std::size_t>();
      entry.index = item.at("index").get<std::size_t>();

      if (entry.shape.empty()) throw DataError("layer '" + entry.name + "': empty shape");
      std::size_t product = 1;
      for (std::size_t a = 1; a < entry.shape.size(); ++a) product *= entry.shape[a];
      if (product != entry.flat_dim) {
        throw DataError("layer '" + entry.name + "': flat_dim " + std::to_string(entry.flat_dim) +
                        " != product of non-image axes " + std::to_string(product));
      }
      if (!indices.insert(entry.index).second) {
        throw DataError("manifest repeats layer index " + std::to_string(entry.index));
      }
      if (!names.insert(entry.name).second) {
        throw DataError("manifest repeats layer name '" + entry.name + "'");
      }
      manifest.layers.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("manifest schema error: ") + e.what());
  }
  std::sort(manifest.layers.begin(), manifest.layers.end(),
            [](const LayerEntry& a, const LayerEntry& b) { return a.index < b.index; });
  return manifest;
}

LayerManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_manifest(text, path.parent_path());
}

void write_manifest(const std::filesystem::path& path, const LayerManifest& manifest) {
  json doc;
  doc["model_name"] = manifest.model_name;
  doc["layers"] = json::array();
  const auto base = path.parent_path();
  for (const auto& layer : manifest.layers) {
    std::filesystem::path stored = layer.path;
    if (!base.empty() && layer.path.is_absolute()) {
      std::error_code ec;
      auto relative = std::filesystem::relative(layer.path, base, ec);
      if (!ec && !relative.empty()) stored = relative;
    }
    doc["layers"].push_back({{"name", layer.name},
                             {"path", stored.generic_string()},
                             {"shape", layer.shape},
                             {"flat_dim", layer.flat_dim},
                             {"index", layer.index}});
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

FeatureMatrix load_layer(const LayerEntry& entry, const std::vector<std::string>& image_ids) {
  if (!std::filesystem::exists(entry.path)) {
    throw DataError("layer '" + entry.name + "': file not found: " + entry.path.string());
  }
  const auto array = read_npy(entry.path);
  if (array.shape.empty()) throw DataError("layer '" + entry.name + "': 0-d array");
  if (array.shape.front() != entry.shape.front()) {
    throw DataError("layer '" + entry.name + "': image axis has " +
                    std::to_string(array.shape.front()) + " entries, manifest says " +
                    std::to_string(entry.shape.front()));
  }
  if (array.shape.front() != image_ids.size()) {
    throw DataError("layer '" + entry.name + "': image axis has " +
                    std::to_string(array.shape.front()) + " entries, ratings have " +
                    std::to_string(image_ids.size()) + " images");
  }
  auto features = feature_matrix_from_npy(array, entry.name);
  if (static_cast<std::size_t>(features.cols()) != entry.flat_dim) {
    throw DataError("layer '" + entry.name + "': flattened dim " +
                    std::to_string(features.cols()) + " != manifest flat_dim " +
                    std::to_string(entry.flat_dim));
  }
  features.image_ids = image_ids;
  features.validate();
  return features;
}

}  // namespace probe

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "probe/feature_matrix.hpp"

namespace probe {

struct LayerEntry {
  std::string name;
  std::filesystem::path path;       // resolved against the manifest directory
  std::vector<std::size_t> shape;   // original shape, image axis first
  std::size_t flat_dim = 0;
  std::size_t index = 0;            // extraction order
};

/// A model's layer inventory. Layers are kept sorted by extraction index.
struct LayerManifest {
  std::string model_name;
  std::vector<LayerEntry> layers;
};

LayerManifest parse_manifest(std::string_view json_text,
                             const std::filesystem::path& base_dir = {});
LayerManifest load_manifest(const std::filesystem::path& path);

/// Writes the manifest with paths relative to the manifest's directory when possible.
void write_manifest(const std::filesystem::path& path, const LayerManifest& manifest);

/// Loads one layer and checks it against the manifest entry and the canonical
/// image order (row count must equal image_ids.size()).
FeatureMatrix load_layer(const LayerEntry& entry, const std::vector<std::string>& image_ids);

}  // namespace probe

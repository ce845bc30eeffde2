#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probe/feature_matrix.hpp"

namespace probe {

enum class NpyDtype { float32, float64 };

/// Decoded array, widened to double, in C (row-major) element order.
struct NpyArray {
  std::vector<std::size_t> shape;
  NpyDtype dtype = NpyDtype::float64;
  std::vector<double> values;
};

/// Parses NPY bytes (format versions 1.0 and 2.0, little-endian f4/f8, C order).
NpyArray parse_npy(std::string_view bytes);
NpyArray read_npy(const std::filesystem::path& path);

/// Encodes a float64 C-order array as NPY v1.0 with the header layout numpy
/// itself writes (dict padded with spaces to a 64-byte boundary).
std::string encode_npy(std::span<const double> values, std::span<const std::size_t> shape);
void write_npy(const std::filesystem::path& path, std::span<const double> values,
               std::span<const std::size_t> shape);

/// Reads an activation array with a leading image axis and flattens the
/// trailing axes row-major: element (i, a, b) of an (n, A, B) array lands in
/// column a*B + b. Non-finite values are rejected.
FeatureMatrix read_feature_array(const std::filesystem::path& path,
                                 std::string layer_name = {});
FeatureMatrix feature_matrix_from_npy(const NpyArray& array, std::string layer_name = {});

/// Writes an n x D float64 array.
void write_feature_array(const std::filesystem::path& path, const FeatureMatrix& features);

}  // namespace probe

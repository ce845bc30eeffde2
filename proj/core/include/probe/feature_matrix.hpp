#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace probe {

/// One layer's activations: row i is the flattened activation of image i in
/// canonical order. Always 64-bit.
struct FeatureMatrix {
  std::vector<std::string> image_ids;
  Eigen::MatrixXd data;
  std::string layer_name;
  bool projected = false;

  Eigen::Index rows() const noexcept { return data.rows(); }
  Eigen::Index cols() const noexcept { return data.cols(); }

  /// Throws DataError unless n >= 2, D >= 1, all entries finite and
  /// image_ids (when present) has one id per row.
  void validate() const;
};

}  // namespace probe

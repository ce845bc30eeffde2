#include "probe/feature_matrix.hpp"

#include "probe/error.hpp"

namespace probe {

void FeatureMatrix::validate() const {
  const std::string label = layer_name.empty() ? std::string("feature matrix") : "layer '" + layer_name + "'";
  if (data.rows() < 2) throw DataError(label + ": need at least 2 images, got " + std::to_string(data.rows()));
  if (data.cols() < 1) throw DataError(label + ": feature dimension is 0");
  if (!image_ids.empty() && static_cast<Eigen::Index>(image_ids.size()) != data.rows()) {
    throw DataError(label + ": " + std::to_string(data.rows()) + " rows but " +
                    std::to_string(image_ids.size()) + " image ids");
  }
  if (!data.allFinite()) throw DataError(label + ": contains non-finite values");
}

}  // namespace probe

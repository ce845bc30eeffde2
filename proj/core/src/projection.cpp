#include "probe/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "probe/error.hpp"
#include "probe/parallel.hpp"
#include "probe/rng.hpp"

namespace probe {

std::size_t jl_min_dimension(std::size_t n, double epsilon) {
  if (n == 0) throw ConfigError("jl_min_dimension: n must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("jl_min_dimension: epsilon must lie in (0, 1)");
  }
  const double denominator = epsilon * epsilon / 2.0 - epsilon * epsilon * epsilon / 3.0;
  const double bound = 4.0 * std::log(static_cast<double>(n)) / denominator;
  return static_cast<std::size_t>(std::floor(bound));
}

ProjectionPlan plan_projection(std::size_t input_dim, std::size_t n, double epsilon,
                               std::uint64_t seed, std::size_t floor) {
  if (input_dim == 0) throw ConfigError("plan_projection: input dimension is 0");
  ProjectionPlan plan;
  plan.n = n;
  plan.input_dim = input_dim;
  plan.epsilon = epsilon;
  plan.seed = seed;
  plan.target_dim = std::max(jl_min_dimension(n, epsilon), floor);
  plan.apply = input_dim > plan.target_dim;
  return plan;
}

SparseProjection SparseProjection::generate(std::size_t input_dim, std::size_t output_dim,
                                            std::uint64_t seed, std::size_t workers) {
  if (input_dim == 0 || output_dim == 0) {
    throw ConfigError("sparse projection dimensions must be positive");
  }
  if (input_dim > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("sparse projection input dimension exceeds 2^32 - 1");
  }

  const double root_d = std::sqrt(static_cast<double>(input_dim));
  const double half_density = 1.0 / (2.0 * root_d);
  const double density = 1.0 / root_d;

  std::vector<std::vector<std::uint32_t>> rows(output_dim);
  std::vector<std::vector<std::int8_t>> signs(output_dim);
  parallel_for(output_dim, workers, [&](std::size_t column) {
    auto& col_rows = rows[column];
    auto& col_signs = signs[column];
    col_rows.reserve(static_cast<std::size_t>(density * static_cast<double>(input_dim) * 1.5) + 4);
    for (std::size_t row = 0; row < input_dim; ++row) {
      const double u = unit_interval(hash_counter(seed, column, row));
      if (u < half_density) {
        col_rows.push_back(static_cast<std::uint32_t>(row));
        col_signs.push_back(1);
      } else if (u < density) {
        col_rows.push_back(static_cast<std::uint32_t>(row));
        col_signs.push_back(-1);
      }
    }
  });

  SparseProjection projection;
  projection.input_dim_ = input_dim;
  projection.output_dim_ = output_dim;
  projection.seed_ = seed;
  projection.value_ = std::sqrt(root_d / static_cast<double>(output_dim));
  projection.offsets_.resize(output_dim + 1, 0);
  for (std::size_t c = 0; c < output_dim; ++c) {
    projection.offsets_[c + 1] = projection.offsets_[c] + rows[c].size();
  }
  projection.rows_.reserve(projection.offsets_.back());
  projection.signs_.reserve(projection.offsets_.back());
  for (std::size_t c = 0; c < output_dim; ++c) {
    projection.rows_.insert(projection.rows_.end(), rows[c].begin(), rows[c].end());
    projection.signs_.insert(projection.signs_.end(), signs[c].begin(), signs[c].end());
  }
  return projection;
}

double SparseProjection::density() const noexcept {
  return 1.0 / std::sqrt(static_cast<double>(input_dim_));
}

std::span<const std::uint32_t> SparseProjection::column_rows(std::size_t column) const {
  return std::span<const std::uint32_t>(rows_).subspan(offsets_.at(column),
                                                       offsets_.at(column + 1) - offsets_[column]);
}

std::span<const std::int8_t> SparseProjection::column_signs(std::size_t column) const {
  return std::span<const std::int8_t>(signs_).subspan(offsets_.at(column),
                                                     offsets_.at(column + 1) - offsets_[column]);
}

Eigen::MatrixXd SparseProjection::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(input_dim_),
                                                static_cast<Eigen::Index>(output_dim_));
  for (std::size_t c = 0; c < output_dim_; ++c) {
    const auto col_rows = column_rows(c);
    const auto col_signs = column_signs(c);
    for (std::size_t k = 0; k < col_rows.size(); ++k) {
      dense(col_rows[k], static_cast<Eigen::Index>(c)) = col_signs[k] * value_;
    }
  }
  return dense;
}

Eigen::MatrixXd project(const Eigen::MatrixXd& features, const SparseProjection& projection,
                        std::size_t workers) {
  if (static_cast<std::size_t>(features.cols()) != projection.input_dim()) {
    throw DataError("projection expects " + std::to_string(projection.input_dim()) +
                    " input columns, features have " + std::to_string(features.cols()));
  }
  const Eigen::Index n = features.rows();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(projection.output_dim()));
  const double value = projection.value();
  parallel_for(projection.output_dim(), workers, [&](std::size_t c) {
    auto column = out.col(static_cast<Eigen::Index>(c));
    column.setZero();
    const auto col_rows = projection.column_rows(c);
    const auto col_signs = projection.column_signs(c);
    for (std::size_t k = 0; k < col_rows.size(); ++k) {
      if (col_signs[k] > 0) {
        column += features.col(col_rows[k]);
      } else {
        column -= features.col(col_rows[k]);
      }
    }
    column *= value;
  });
  return out;
}

FeatureMatrix project(const FeatureMatrix& features, const SparseProjection& projection,
                      std::size_t workers) {
  FeatureMatrix out;
  out.image_ids = features.image_ids;
  out.layer_name = features.layer_name;
  out.data = project(features.data, projection, workers);
  out.projected = true;
  return out;
}

}  // namespace probe

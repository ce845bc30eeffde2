#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "probe/feature_matrix.hpp"

namespace probe {

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr std::size_t kDefaultProjectionFloor = 5830;

/// Smallest target dimension for which a random projection of n points keeps
/// every pairwise squared distance within (1 +/- epsilon):
/// floor(4 ln n / (eps^2/2 - eps^3/3)). Floor, not ceiling, so that
/// (900, 0.1) gives 5830.
std::size_t jl_min_dimension(std::size_t n, double epsilon);

struct ProjectionPlan {
  std::size_t n = 0;
  std::size_t input_dim = 0;
  double epsilon = kDefaultEpsilon;
  std::size_t target_dim = 0;
  std::uint64_t seed = 0;
  bool apply = false;
};

/// target_dim = max(jl_min_dimension(n, epsilon), floor); projection applies
/// only when input_dim > target_dim.
ProjectionPlan plan_projection(std::size_t input_dim, std::size_t n, double epsilon,
                               std::uint64_t seed,
                               std::size_t floor = kDefaultProjectionFloor);

/// Very sparse random projection matrix R (input_dim x output_dim). Entries
/// are +v or -v with probability 1/(2 sqrt(D)) each and 0 otherwise, where
/// v = sqrt(sqrt(D) / p). Stored column-compressed: each output column keeps
/// its nonzero row indices and signs, so F*R is a sum of signed columns of F.
///
/// Entry (row j, column i) is decided by one uniform draw from a counter-based
/// generator keyed by (seed, i, j). The matrix is a pure function of
/// (D, p, seed), independent of worker count.
class SparseProjection {
 public:
  static SparseProjection generate(std::size_t input_dim, std::size_t output_dim,
                                   std::uint64_t seed, std::size_t workers = 1);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Magnitude of every nonzero entry.
  double value() const noexcept { return value_; }
  /// Per-entry nonzero probability 1/sqrt(D).
  double density() const noexcept;
  std::size_t nonzeros() const noexcept { return rows_.size(); }

  std::span<const std::uint32_t> column_rows(std::size_t column) const;
  std::span<const std::int8_t> column_signs(std::size_t column) const;

  /// Dense copy of R. Test and debugging aid; D x p doubles.
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const SparseProjection&, const SparseProjection&) = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::uint64_t seed_ = 0;
  double value_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> rows_;
  std::vector<std::int8_t> signs_;
};

/// P = F R. Result is n x p with projected = true.
FeatureMatrix project(const FeatureMatrix& features, const SparseProjection& projection,
                      std::size_t workers = 1);
Eigen::MatrixXd project(const Eigen::MatrixXd& features, const SparseProjection& projection,
                        std::size_t workers = 1);

}  // namespace probe

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace probe {

inline constexpr double kDefaultLambda = 1e4;

struct StandardizationParams {
  Eigen::VectorXd column_means;
  Eigen::VectorXd column_sds;      // population convention (divide by n)
  std::vector<bool> zero_variance;  // columns mapped to all zeros
  double target_mean = 0.0;
  double target_sd = 1.0;

  std::size_t zero_variance_count() const;
};

struct Standardized {
  Eigen::MatrixXd features;
  Eigen::VectorXd target;
  StandardizationParams params;
};

/// Z-scores every column and the target over the full dataset. Constant
/// columns become zero columns and are flagged. Requires n >= 3 and a target
/// with nonzero variance.
Standardized standardize(const Eigen::MatrixXd& features, const Eigen::VectorXd& target);

/// Column z-scoring alone (no target); constant columns map to zero.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& features,
                                    StandardizationParams* params = nullptr);
/// Z-scores a vector; throws NumericalError when it has zero variance.
Eigen::VectorXd standardize_vector(const Eigen::VectorXd& values, double* mean = nullptr,
                                   double* sd = nullptr);

enum class RidgeForm { automatic, primal, dual };

struct LoocvDiagnostics {
  RidgeForm form = RidgeForm::primal;
  double condition_estimate = 0.0;  // reciprocal of the factorization's rcond
  double min_leverage = 0.0;
  double max_leverage = 0.0;
};

struct LoocvPredictions {
  Eigen::VectorXd values;  // standardized units
  double lambda = 0.0;
  LoocvDiagnostics diagnostics;
};

/// Leave-one-out ridge predictions (no intercept; inputs are standardized)
/// from a single factorization. For each row i the held-out prediction is
/// (fitted_i - h_ii y_i) / (1 - h_ii), with h the hat matrix of the full fit.
///
/// The primal form factors P'P + lambda I (p x p); the dual form factors
/// PP' + lambda I (n x n) and is chosen automatically when p > n. The
/// factorization depends only on P and lambda, so one solver serves any
/// number of targets.
class RidgeLoocv {
 public:
  RidgeLoocv(const Eigen::MatrixXd& features, double lambda,
             RidgeForm form = RidgeForm::automatic);

  /// Reuses a Gram matrix computed by gram_matrix(features, form), so a
  /// lambda sweep forms it once.
  RidgeLoocv(const Eigen::MatrixXd& features, const Eigen::MatrixXd& gram, double lambda,
             RidgeForm form);

  /// The form actually used for `features` (resolves automatic).
  static RidgeForm resolve_form(const Eigen::MatrixXd& features, RidgeForm form) noexcept;
  /// P'P for the primal form, PP' for the dual form.
  static Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& features, RidgeForm form);

  LoocvPredictions predict(const Eigen::VectorXd& target) const;

  double lambda() const noexcept { return lambda_; }
  const LoocvDiagnostics& diagnostics() const noexcept { return diagnostics_; }
  const Eigen::VectorXd& leverage() const noexcept { return leverage_; }

 private:
  void factor(const Eigen::MatrixXd& features, const Eigen::MatrixXd& gram);

  double lambda_;
  LoocvDiagnostics diagnostics_;
  Eigen::VectorXd leverage_;
  // primal: copy of P and the factor of P'P + lambda I
  // dual:   the inverse of PP' + lambda I
  Eigen::MatrixXd features_;
  Eigen::LLT<Eigen::MatrixXd> primal_factor_;
  Eigen::MatrixXd dual_inverse_;
};

LoocvPredictions ridge_loocv_predict(const Eigen::MatrixXd& features,
                                     const Eigen::VectorXd& target, double lambda,
                                     RidgeForm form = RidgeForm::automatic);

/// Logarithmic grid 1e-1 ... 1e6, eight points.
std::vector<double> default_lambda_grid();

struct LambdaSearchResult {
  double best = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_error;                   // per grid point, mean over layers
  std::vector<std::vector<double>> layer_errors;    // [layer][grid point]
  std::vector<double> per_layer_best;               // argmin per layer
};

/// Picks the grid value minimizing the across-layer mean of ||y - yhat(lambda)||_2.
/// Ties go to the earlier (smaller) grid value. Throws ConfigError on an empty
/// or non-increasing grid.
LambdaSearchResult grid_search_lambda(std::span<const Standardized> layers,
                                      std::span<const double> grid);

}  // namespace probe

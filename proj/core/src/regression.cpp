#include "probe/regression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "probe/error.hpp"

namespace probe {

namespace {

// Reciprocal condition below this is treated as a singular system.
constexpr double kSingularRcond = 1e-15;
// 1 - h_ii at or below this is degenerate leverage.
constexpr double kLeverageGap = 1e-10;

struct ColumnMoments {
  double mean = 0.0;
  double sd = 0.0;
  bool constant = false;
};

template <typename Vector>
ColumnMoments moments(const Vector& values) {
  const auto n = static_cast<double>(values.size());
  const double anchor = values[0];
  double offset = 0.0;
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    offset += values[i] - anchor;
    max_abs = std::max(max_abs, std::abs(values[i]));
  }
  ColumnMoments m;
  m.mean = anchor + offset / n;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double d = values[i] - m.mean;
    ss += d * d;
  }
  m.sd = std::sqrt(ss / n);
  m.constant = m.sd == 0.0 || m.sd <= 1e-12 * max_abs;
  return m;
}

}  // namespace

std::size_t StandardizationParams::zero_variance_count() const {
  std::size_t count = 0;
  for (bool flag : zero_variance) count += flag ? 1 : 0;
  return count;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& features,
                                    StandardizationParams* params) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (n < 1) throw DataError("standardize: no rows");
  Eigen::MatrixXd out(n, p);
  if (params != nullptr) {
    params->column_means.resize(p);
    params->column_sds.resize(p);
    params->zero_variance.assign(static_cast<std::size_t>(p), false);
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto m = moments(features.col(j));
    if (m.constant) {
      out.col(j).setZero();
    } else {
      out.col(j) = (features.col(j).array() - m.mean) / m.sd;
    }
    if (params != nullptr) {
      params->column_means[j] = m.mean;
      params->column_sds[j] = m.sd;
      params->zero_variance[static_cast<std::size_t>(j)] = m.constant;
    }
  }
  return out;
}

Eigen::VectorXd standardize_vector(const Eigen::VectorXd& values, double* mean, double* sd) {
  if (values.size() < 1) throw DataError("standardize: empty target");
  const auto m = moments(values);
  if (m.constant) throw NumericalError("target has zero variance");
  if (mean != nullptr) *mean = m.mean;
  if (sd != nullptr) *sd = m.sd;
  return (values.array() - m.mean) / m.sd;
}

Standardized standardize(const Eigen::MatrixXd& features, const Eigen::VectorXd& target) {
  if (features.rows() < 3) {
    throw DataError("standardize: need at least 3 rows, got " + std::to_string(features.rows()));
  }
  if (features.rows() != target.size()) {
    throw DataError("standardize: " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(target.size()) + " targets");
  }
  Standardized out;
  out.target = standardize_vector(target, &out.params.target_mean, &out.params.target_sd);
  out.features = standardize_columns(features, &out.params);
  return out;
}

RidgeForm RidgeLoocv::resolve_form(const Eigen::MatrixXd& features, RidgeForm form) noexcept {
  if (form != RidgeForm::automatic) return form;
  return features.cols() > features.rows() ? RidgeForm::dual : RidgeForm::primal;
}

Eigen::MatrixXd RidgeLoocv::gram_matrix(const Eigen::MatrixXd& features, RidgeForm form) {
  form = resolve_form(features, form);
  const Eigen::Index size = form == RidgeForm::dual ? features.rows() : features.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(size, size);
  if (form == RidgeForm::dual) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features);
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return gram;
}

RidgeLoocv::RidgeLoocv(const Eigen::MatrixXd& features, double lambda, RidgeForm form)
    : lambda_(lambda) {
  diagnostics_.form = resolve_form(features, form);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  factor(features, gram_matrix(features, diagnostics_.form));
}

RidgeLoocv::RidgeLoocv(const Eigen::MatrixXd& features, const Eigen::MatrixXd& gram,
                       double lambda, RidgeForm form)
    : lambda_(lambda) {
  diagnostics_.form = resolve_form(features, form);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  factor(features, gram);
}

void RidgeLoocv::factor(const Eigen::MatrixXd& features, const Eigen::MatrixXd& gram) {
  if (features.rows() < 2 || features.cols() < 1) throw DataError("ridge: empty design matrix");
  if (!features.allFinite()) throw DataError("ridge: design matrix has non-finite entries");

  Eigen::MatrixXd system = gram;
  system.diagonal().array() += lambda_;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("ridge system is singular (lambda = " + std::to_string(lambda_) + ")");
  }
  const double rcond = llt.rcond();
  if (!(rcond > kSingularRcond)) {
    throw NumericalError("ridge system is numerically singular (rcond " + std::to_string(rcond) +
                         ", lambda = " + std::to_string(lambda_) + ")");
  }
  diagnostics_.condition_estimate = 1.0 / rcond;

  const Eigen::Index n = features.rows();
  if (diagnostics_.form == RidgeForm::dual) {
    dual_inverse_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
    leverage_ = (1.0 - lambda_ * dual_inverse_.diagonal().array()).matrix();
  } else {
    const Eigen::MatrixXd whitened = llt.matrixL().solve(features.transpose());
    leverage_ = whitened.colwise().squaredNorm().transpose();
    features_ = features;
    primal_factor_ = std::move(llt);
  }
  diagnostics_.min_leverage = leverage_.minCoeff();
  diagnostics_.max_leverage = leverage_.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(1.0 - leverage_[i] > kLeverageGap)) {
      throw NumericalError("degenerate leverage h_ii = " + std::to_string(leverage_[i]) +
                           " at row " + std::to_string(i));
    }
  }
}

LoocvPredictions RidgeLoocv::predict(const Eigen::VectorXd& target) const {
  const Eigen::Index n = leverage_.size();
  if (target.size() != n) {
    throw DataError("ridge: target length " + std::to_string(target.size()) + " != rows " +
                    std::to_string(n));
  }
  if (!target.allFinite()) throw DataError("ridge: target has non-finite entries");

  LoocvPredictions out;
  out.lambda = lambda_;
  out.diagnostics = diagnostics_;
  if (diagnostics_.form == RidgeForm::dual) {
    const Eigen::VectorXd dual_coef = dual_inverse_ * target;
    out.values = target.array() - dual_coef.array() / dual_inverse_.diagonal().array();
  } else {
    const Eigen::VectorXd coef = primal_factor_.solve(features_.transpose() * target);
    const Eigen::VectorXd fitted = features_ * coef;
    out.values = (fitted.array() - leverage_.array() * target.array()) / (1.0 - leverage_.array());
  }
  if (!out.values.allFinite()) throw NumericalError("ridge: non-finite LOO predictions");
  return out;
}

LoocvPredictions ridge_loocv_predict(const Eigen::MatrixXd& features,
                                     const Eigen::VectorXd& target, double lambda,
                                     RidgeForm form) {
  if (features.rows() != target.size()) {
    throw DataError("ridge: " + std::to_string(features.rows()) + " rows but " +
                    std::to_string(target.size()) + " targets");
  }
  return RidgeLoocv(features, lambda, form).predict(target);
}

std::vector<double> default_lambda_grid() {
  return {1e-1, 1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
}

LambdaSearchResult grid_search_lambda(std::span<const Standardized> layers,
                                      std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  if (layers.empty()) throw ConfigError("lambda search needs at least one layer");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0)) throw ConfigError("lambda grid values must be >= 0");
    if (g > 0 && !(grid[g] > grid[g - 1])) throw ConfigError("lambda grid must be strictly increasing");
  }

  LambdaSearchResult result;
  result.grid.assign(grid.begin(), grid.end());
  result.mean_error.assign(grid.size(), 0.0);
  result.layer_errors.assign(layers.size(), std::vector<double>(grid.size(), 0.0));
  result.per_layer_best.resize(layers.size());

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto form = RidgeLoocv::resolve_form(layer.features, RidgeForm::automatic);
    const Eigen::MatrixXd gram = RidgeLoocv::gram_matrix(layer.features, form);
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double error = std::numeric_limits<double>::infinity();
      try {
        const auto loo = RidgeLoocv(layer.features, gram, grid[g], form).predict(layer.target);
        error = (layer.target - loo.values).norm();
      } catch (const NumericalError&) {
        // an unusable grid point simply loses
      }
      result.layer_errors[l][g] = error;
      result.mean_error[g] += error / static_cast<double>(layers.size());
      if (error < result.layer_errors[l][best]) best = g;
    }
    result.per_layer_best[l] = grid[best];
  }

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (result.mean_error[g] < result.mean_error[best]) best = g;
  }
  if (!std::isfinite(result.mean_error[best])) {
    throw NumericalError("every lambda on the grid produced a degenerate system");
  }
  result.best = grid[best];
  return result;
}

}  // namespace probe

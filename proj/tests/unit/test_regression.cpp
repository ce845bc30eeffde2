#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "probe/error.hpp"
#include "probe/regression.hpp"

using namespace probe;
using probe::testing::gaussian_matrix;
using probe::testing::gaussian_vector;
using probe::testing::naive_loo_ridge;

namespace {

double relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(want.cwiseAbs().maxCoeff(), 1e-300);
}

Standardized standardized_problem(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  return standardize(gaussian_matrix(n, p, seed), gaussian_vector(n, seed + 1000));
}

}  // namespace

TEST_SUITE("standardize") {
  TEST_CASE("column [1,2,3] uses the population sd") {
    Eigen::MatrixXd f(3, 1);
    f << 1, 2, 3;
    Eigen::VectorXd y(3);
    y << 1, 0, 2;
    const auto s = standardize(f, y);
    CHECK(s.features(0, 0) == doctest::Approx(-1.2247448713915890).epsilon(1e-15));
    CHECK(s.features(1, 0) == 0.0);
    CHECK(s.features(2, 0) == doctest::Approx(1.2247448713915890).epsilon(1e-15));
    CHECK(s.params.column_sds[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  }

  TEST_CASE("constant column maps to zeros with a flag") {
    Eigen::MatrixXd f(3, 2);
    f << 5, 1, 5, 2, 5, 4;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    const auto s = standardize(f, y);
    CHECK(s.features.col(0).isZero(0.0));
    CHECK(s.params.zero_variance[0]);
    CHECK_FALSE(s.params.zero_variance[1]);
    CHECK(s.params.zero_variance_count() == 1);
  }

  TEST_CASE("constant non-representable column still maps to zeros") {
    Eigen::MatrixXd f = Eigen::MatrixXd::Constant(7, 1, 0.1);
    const auto z = standardize_columns(f);
    CHECK(z.isZero(0.0));
  }

  TEST_CASE("idempotent on standardized input") {
    const auto once = standardized_problem(40, 6, 3);
    const auto twice = standardize(once.features, once.target);
    CHECK((twice.features - once.features).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((twice.target - once.target).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("columns have mean 0 and sd 1") {
    const auto s = standardized_problem(25, 9, 8);
    for (Eigen::Index j = 0; j < s.features.cols(); ++j) {
      CHECK(std::abs(s.features.col(j).mean()) < 1e-10);
      CHECK(std::sqrt(s.features.col(j).squaredNorm() / 25.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("errors") {
    Eigen::MatrixXd f = gaussian_matrix(5, 2, 1);
    CHECK_THROWS_AS(standardize(f, Eigen::VectorXd::Constant(5, 3.0)), NumericalError);
    CHECK_THROWS_AS(standardize(gaussian_matrix(2, 2, 1), gaussian_vector(2, 2)), DataError);
    CHECK_THROWS_AS(standardize(f, gaussian_vector(4, 2)), DataError);
  }
}

TEST_SUITE("ridge_loocv_predict") {
  TEST_CASE("noiseless identifiable model at lambda=0 reproduces y") {
    const Eigen::MatrixXd p = gaussian_matrix(20, 3, 5);
    Eigen::Vector3d w(0.7, -1.3, 2.0);
    const Eigen::VectorXd y = p * w;
    const auto loo = ridge_loocv_predict(p, y, 0.0);
    CHECK(loo.diagnostics.form == RidgeForm::primal);
    CHECK((loo.values - y).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("huge lambda shrinks predictions to zero") {
    for (auto [n, p] : {std::pair{30, 5}, std::pair{12, 40}}) {
      const auto s = standardized_problem(n, p, static_cast<std::uint64_t>(n * p));
      const auto loo = ridge_loocv_predict(s.features, s.target, 1e12);
      CHECK(loo.values.cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("seeded 8x3 problem at lambda=10 matches per-row refits") {
    const auto s = standardized_problem(8, 3, 808);
    const auto fast = ridge_loocv_predict(s.features, s.target, 10.0);
    const auto naive = naive_loo_ridge(s.features, s.target, 10.0);
    CHECK(relative_error(fast.values, naive) < 1e-8);
  }

  TEST_CASE("oracle equivalence over random instances") {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> rows(6, 50);
    std::uniform_int_distribution<int> cols(1, 20);
    const double lambdas[] = {0.1, 10.0, 1e4};
    for (int instance = 0; instance < 30; ++instance) {
      const int n = rows(gen);
      const int p = cols(gen);
      const double lambda = lambdas[instance % 3];
      const auto s = standardized_problem(n, p, gen());
      const auto fast = ridge_loocv_predict(s.features, s.target, lambda);
      const auto naive = naive_loo_ridge(s.features, s.target, lambda);
      CAPTURE(n);
      CAPTURE(p);
      CAPTURE(lambda);
      CHECK(relative_error(fast.values, naive) < 1e-8);
    }
  }

  TEST_CASE("primal and dual agree") {
    for (auto [n, p] : {std::pair{15, 4}, std::pair{10, 25}, std::pair{30, 30}}) {
      const auto s = standardized_problem(n, p, static_cast<std::uint64_t>(7 * n + p));
      for (double lambda : {0.1, 3.0, 1e4}) {
        const auto primal = ridge_loocv_predict(s.features, s.target, lambda, RidgeForm::primal);
        const auto dual = ridge_loocv_predict(s.features, s.target, lambda, RidgeForm::dual);
        CHECK(primal.diagnostics.form == RidgeForm::primal);
        CHECK(dual.diagnostics.form == RidgeForm::dual);
        CHECK((primal.values - dual.values).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }

  TEST_CASE("automatic form picks dual when p > n") {
    const auto s = standardized_problem(10, 30, 4);
    CHECK(ridge_loocv_predict(s.features, s.target, 1.0).diagnostics.form == RidgeForm::dual);
  }

  TEST_CASE("monotone shrinkage of the prediction norm") {
    const auto s = standardized_problem(35, 12, 12);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
      const double norm = ridge_loocv_predict(s.features, s.target, lambda).values.norm();
      CHECK(norm <= previous + 1e-9);
      previous = norm;
    }
  }

  TEST_CASE("permutation equivariance") {
    const auto s = standardized_problem(18, 5, 77);
    std::vector<int> order(18);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), std::mt19937_64(3));
    Eigen::MatrixXd fp(18, 5);
    Eigen::VectorXd yp(18);
    for (int i = 0; i < 18; ++i) {
      fp.row(i) = s.features.row(order[i]);
      yp[i] = s.target[order[i]];
    }
    const auto base = ridge_loocv_predict(s.features, s.target, 2.0).values;
    const auto permuted = ridge_loocv_predict(fp, yp, 2.0).values;
    for (int i = 0; i < 18; ++i) CHECK(permuted[i] == doctest::Approx(base[order[i]]).epsilon(1e-12));
  }

  TEST_CASE("one solver serves several targets") {
    const Eigen::MatrixXd p = standardized_problem(20, 6, 1).features;
    const RidgeLoocv solver(p, 5.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Eigen::VectorXd y = gaussian_vector(20, seed);
      CHECK(relative_error(solver.predict(y).values, naive_loo_ridge(p, y, 5.0)) < 1e-8);
    }
  }

  TEST_CASE("diagnostics") {
    const auto s = standardized_problem(20, 4, 6);
    const auto loo = ridge_loocv_predict(s.features, s.target, 1.0);
    CHECK(loo.diagnostics.condition_estimate >= 1.0);
    CHECK(loo.diagnostics.min_leverage >= 0.0);
    CHECK(loo.diagnostics.max_leverage < 1.0);
    CHECK(loo.lambda == 1.0);
  }

  TEST_CASE("singular system at lambda=0") {
    Eigen::MatrixXd p = gaussian_matrix(10, 3, 2);
    p.col(2) = p.col(0);
    CHECK_THROWS_AS(ridge_loocv_predict(p, gaussian_vector(10, 1), 0.0), NumericalError);
  }

  TEST_CASE("degenerate leverage in the dual form at lambda=0") {
    const Eigen::MatrixXd p = gaussian_matrix(5, 12, 2);
    CHECK_THROWS_WITH_AS(ridge_loocv_predict(p, gaussian_vector(5, 1), 0.0),
                         doctest::Contains("leverage"), NumericalError);
  }

  TEST_CASE("input validation") {
    const Eigen::MatrixXd p = gaussian_matrix(6, 2, 2);
    CHECK_THROWS_AS(ridge_loocv_predict(p, gaussian_vector(5, 1), 1.0), DataError);
    CHECK_THROWS_AS(ridge_loocv_predict(p, gaussian_vector(6, 1), -1.0), ConfigError);
    Eigen::MatrixXd bad = p;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(ridge_loocv_predict(bad, gaussian_vector(6, 1), 1.0), DataError);
  }
}

TEST_SUITE("grid_search_lambda") {
  // The oracle sweeps the grid with explicit refits and takes the argmin.
  double naive_best(const std::vector<Standardized>& layers, const std::vector<double>& grid) {
    std::size_t best = 0;
    double best_error = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double error = 0.0;
      for (const auto& layer : layers) {
        error += (layer.target - naive_loo_ridge(layer.features, layer.target, grid[g])).norm();
      }
      if (error < best_error) {
        best_error = error;
        best = g;
      }
    }
    return grid[best];
  }

  TEST_CASE("default grid") {
    const auto grid = default_lambda_grid();
    REQUIRE(grid.size() == 8);
    CHECK(grid.front() == 0.1);
    CHECK(grid.back() == 1e6);
    CHECK(std::find(grid.begin(), grid.end(), kDefaultLambda) != grid.end());
  }

  TEST_CASE("noiseless linear layer picks the smallest lambda") {
    const Eigen::MatrixXd p = gaussian_matrix(40, 4, 9);
    Eigen::Vector4d w(1.0, -2.0, 0.5, 0.25);
    std::vector<Standardized> layers{standardize(p, p * w)};
    const auto grid = default_lambda_grid();
    const auto result = grid_search_lambda(layers, grid);
    CHECK(result.best == naive_best(layers, grid));
    CHECK(result.best == grid.front());
  }

  TEST_CASE("pure-noise target picks the largest lambda") {
    std::vector<Standardized> layers{standardize(gaussian_matrix(40, 15, 21), gaussian_vector(40, 22))};
    const auto grid = default_lambda_grid();
    const auto result = grid_search_lambda(layers, grid);
    CHECK(result.best == naive_best(layers, grid));
    CHECK(result.best == grid.back());
  }

  TEST_CASE("across-layer mean and per-layer choices") {
    const Eigen::MatrixXd p = gaussian_matrix(30, 3, 4);
    Eigen::Vector3d w(1.0, 1.0, -1.0);
    const Eigen::VectorXd y = p * w + 0.5 * gaussian_vector(30, 5);
    std::vector<Standardized> layers{standardize(p, y), standardize(gaussian_matrix(30, 8, 6), y)};
    const auto grid = default_lambda_grid();
    const auto result = grid_search_lambda(layers, grid);
    CHECK(result.best == naive_best(layers, grid));
    CHECK(result.per_layer_best.size() == 2);
    CHECK(result.per_layer_best[0] == naive_best({layers[0]}, grid));
    CHECK(result.per_layer_best[1] == naive_best({layers[1]}, grid));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      CHECK(result.mean_error[g] ==
            doctest::Approx((result.layer_errors[0][g] + result.layer_errors[1][g]) / 2.0));
    }
  }

  TEST_CASE("grid validation") {
    std::vector<Standardized> layers{standardized_problem(10, 2, 1)};
    CHECK_THROWS_AS(grid_search_lambda(layers, std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(grid_search_lambda(layers, std::vector<double>{1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(grid_search_lambda({}, default_lambda_grid()), ConfigError);
  }
}

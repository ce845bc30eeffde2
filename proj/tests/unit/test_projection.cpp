#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "probe/error.hpp"
#include "probe/projection.hpp"
#include "probe/rng.hpp"

using namespace probe;
using probe::testing::gaussian_matrix;
using probe::testing::pairwise_sq_distances;

TEST_SUITE("jl_min_dimension") {
  TEST_CASE("published setting n=900, eps=0.1 gives 5830") { CHECK(jl_min_dimension(900, 0.1) == 5830); }

  TEST_CASE("n=1 needs no dimensions") { CHECK(jl_min_dimension(1, 0.1) == 0); }

  TEST_CASE("n=100, eps=0.5 gives 221") {
    // 4 ln 100 / (0.125 - 0.041666...) = 221.048..., checked with 50-digit arithmetic
    CHECK(jl_min_dimension(100, 0.5) == 221);
  }

  TEST_CASE("epsilon outside (0, 1)") {
    CHECK_THROWS_AS(jl_min_dimension(10, 0.0), ConfigError);
    CHECK_THROWS_AS(jl_min_dimension(10, 1.0), ConfigError);
    CHECK_THROWS_AS(jl_min_dimension(10, -0.2), ConfigError);
    CHECK_THROWS_AS(jl_min_dimension(0, 0.1), ConfigError);
  }

  TEST_CASE("monotone: more points or smaller epsilon never lowers the bound") {
    for (std::size_t n = 2; n < 5000; n += 97) {
      CHECK(jl_min_dimension(n + 1, 0.2) >= jl_min_dimension(n, 0.2));
      CHECK(jl_min_dimension(n, 0.15) >= jl_min_dimension(n, 0.2));
    }
  }
}

TEST_SUITE("plan_projection") {
  TEST_CASE("large layer at defaults projects to 5830") {
    const auto plan = plan_projection(100000, 900, kDefaultEpsilon, 1);
    CHECK(plan.apply);
    CHECK(plan.target_dim == 5830);
  }

  TEST_CASE("small layer passes through") {
    const auto plan = plan_projection(512, 900, kDefaultEpsilon, 1);
    CHECK_FALSE(plan.apply);
    CHECK(plan.target_dim == 5830);
  }

  TEST_CASE("boundary: D = p passes through, D = p + 1 projects") {
    CHECK_FALSE(plan_projection(5830, 900, 0.1, 1).apply);
    CHECK(plan_projection(5831, 900, 0.1, 1).apply);
  }

  TEST_CASE("bound above the floor wins") {
    const auto plan = plan_projection(100000, 900, 0.05, 1, 100);
    CHECK(plan.target_dim == jl_min_dimension(900, 0.05));
    CHECK(plan.target_dim > 5830);
  }
}

TEST_SUITE("sparse projection") {
  TEST_CASE("D=10000, p=5830: values and density") {
    const auto r = SparseProjection::generate(10000, 5830, 3);
    CHECK(r.value() == doctest::Approx(std::sqrt(100.0 / 5830.0)).epsilon(1e-15));
    CHECK(r.density() == doctest::Approx(0.01));
    const double trials = 10000.0 * 5830.0;
    const double expected = trials * 0.01;
    const double sigma = std::sqrt(trials * 0.01 * 0.99);
    CHECK(std::abs(static_cast<double>(r.nonzeros()) - expected) < 5.0 * sigma);
  }

  TEST_CASE("D=1 gives a dense matrix of +/-0.5") {
    const auto r = SparseProjection::generate(1, 4, 9);
    CHECK(r.density() == 1.0);
    CHECK(r.nonzeros() == 4);
    const auto dense = r.to_dense();
    for (int c = 0; c < 4; ++c) CHECK(std::abs(dense(0, c)) == 0.5);
  }

  TEST_CASE("every stored value is exactly +v or -v and signs are balanced") {
    const auto r = SparseProjection::generate(2500, 300, 17);
    const auto dense = r.to_dense();
    std::size_t plus = 0;
    std::size_t minus = 0;
    for (Eigen::Index j = 0; j < dense.rows(); ++j) {
      for (Eigen::Index i = 0; i < dense.cols(); ++i) {
        const double v = dense(j, i);
        if (v == 0.0) continue;
        CHECK((v == r.value() || v == -r.value()));
        (v > 0 ? plus : minus) += 1;
      }
    }
    CHECK(plus + minus == r.nonzeros());
    const double total = static_cast<double>(plus + minus);
    CHECK(std::abs(static_cast<double>(plus) - total / 2) < 5.0 * std::sqrt(total / 4));
  }

  TEST_CASE("fully determined by (D, p, seed) and independent of workers") {
    const auto a = SparseProjection::generate(3000, 200, 42, 1);
    const auto b = SparseProjection::generate(3000, 200, 42, 4);
    const auto c = SparseProjection::generate(3000, 200, 43, 1);
    CHECK(a == b);
    CHECK_FALSE(a == c);
  }

  TEST_CASE("mean squared norm of projected unit vectors is within 2% of 1") {
    // Monte Carlo: E ||x R||^2 = ||x||^2 under the sqrt(sqrt(D)/p) scaling.
    const auto r = SparseProjection::generate(4096, 600, 2024);
    Eigen::MatrixXd x = gaussian_matrix(1000, 4096, 77);
    x.rowwise().normalize();
    const Eigen::MatrixXd projected = project(x, r);
    const double mean = projected.rowwise().squaredNorm().mean();
    CHECK(std::abs(mean - 1.0) < 0.02);
  }
}

TEST_SUITE("project") {
  TEST_CASE("shape algebra and flags") {
    FeatureMatrix f;
    f.data = gaussian_matrix(6, 900, 1);
    f.layer_name = "l";
    f.image_ids = {"a", "b", "c", "d", "e", "f"};
    const auto r = SparseProjection::generate(900, 37, 5);
    const auto p = project(f, r);
    CHECK(p.rows() == 6);
    CHECK(p.cols() == 37);
    CHECK(p.projected);
    CHECK(p.image_ids == f.image_ids);
    CHECK(p.layer_name == "l");
  }

  TEST_CASE("matches the dense product") {
    const Eigen::MatrixXd f = gaussian_matrix(7, 400, 8);
    const auto r = SparseProjection::generate(400, 50, 12);
    const Eigen::MatrixXd dense = f * r.to_dense();
    CHECK((project(f, r) - dense).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("zero input gives zero output") {
    const auto r = SparseProjection::generate(500, 60, 1);
    CHECK(project(Eigen::MatrixXd::Zero(4, 500), r).isZero(0.0));
  }

  TEST_CASE("dimension mismatch") {
    const auto r = SparseProjection::generate(500, 60, 1);
    CHECK_THROWS_AS(project(Eigen::MatrixXd::Zero(4, 499), r), DataError);
  }

  TEST_CASE("linearity to machine precision") {
    const auto r = SparseProjection::generate(1500, 120, 99);
    const Eigen::MatrixXd f1 = gaussian_matrix(10, 1500, 2);
    const Eigen::MatrixXd f2 = gaussian_matrix(10, 1500, 3);
    const double a = 1.7;
    const double b = -0.3;
    const Eigen::MatrixXd lhs = project(Eigen::MatrixXd(a * f1 + b * f2), r);
    const Eigen::MatrixXd rhs = a * project(f1, r) + b * project(f2, r);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }

  TEST_CASE("workers do not change the result") {
    const auto r = SparseProjection::generate(800, 90, 4);
    const Eigen::MatrixXd f = gaussian_matrix(12, 800, 6);
    CHECK(project(f, r, 1) == project(f, r, 3));
  }

  TEST_CASE("50x2000 at p=800: at least 99% of pairs within (1 +/- 0.3)") {
    const Eigen::MatrixXd f = gaussian_matrix(50, 2000, 31);
    const auto before = pairwise_sq_distances(f);
    const auto after = pairwise_sq_distances(project(f, SparseProjection::generate(2000, 800, 31)));
    REQUIRE(before.size() == 1225);
    std::size_t inside = 0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      const double ratio = after[k] / before[k];
      inside += (ratio > 0.7 && ratio < 1.3) ? 1 : 0;
    }
    CHECK(static_cast<double>(inside) >= 0.99 * 1225.0);
  }

  TEST_CASE("distortion bound holds at the JL dimension for several seeds") {
    const double eps = 0.25;
    const std::size_t n = 30;
    const auto p = jl_min_dimension(n, eps);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Eigen::MatrixXd f = gaussian_matrix(n, 3000, 100 + seed);
      const auto before = pairwise_sq_distances(f);
      const auto after = pairwise_sq_distances(project(f, SparseProjection::generate(3000, p, seed)));
      std::size_t violations = 0;
      for (std::size_t k = 0; k < before.size(); ++k) {
        const double ratio = after[k] / before[k];
        violations += (ratio <= 1 - eps || ratio >= 1 + eps) ? 1 : 0;
      }
      CHECK(static_cast<double>(violations) <= 0.01 * static_cast<double>(before.size()));
    }
  }
}

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include <Eigen/Core>

#include "probe/projection.hpp"
#include "probe/regression.hpp"
#include "probe/scoring.hpp"

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

void BM_ProjectionGenerate(benchmark::State& state) {
  const auto input = static_cast<std::size_t>(state.range(0));
  const auto output = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto r = probe::SparseProjection::generate(input, output, 1);
    benchmark::DoNotOptimize(r.nonzeros());
  }
}
BENCHMARK(BM_ProjectionGenerate)->Args({20000, 434})->Args({50000, 5830})->Unit(benchmark::kMillisecond);

void BM_ProjectionApply(benchmark::State& state) {
  const auto n = state.range(0);
  const auto input = state.range(1);
  const auto x = random_matrix(n, input, 2);
  const auto r = probe::SparseProjection::generate(static_cast<std::size_t>(input), 5830, 3);
  for (auto _ : state) {
    auto y = probe::project(x, r);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_ProjectionApply)->Args({900, 8000})->Args({900, 20000})->Unit(benchmark::kMillisecond);

void BM_RidgeLoocv(benchmark::State& state) {
  const auto n = state.range(0);
  const auto p = state.range(1);
  const auto x = random_matrix(n, p, 4);
  const Eigen::VectorXd y = random_matrix(n, 1, 5).col(0);
  for (auto _ : state) {
    auto loo = probe::ridge_loocv_predict(x, y, 1e4);
    benchmark::DoNotOptimize(loo.values.data());
  }
}
BENCHMARK(BM_RidgeLoocv)->Args({900, 256})->Args({900, 5830})->Unit(benchmark::kMillisecond);

void BM_SplitHalf(benchmark::State& state) {
  const auto images = static_cast<std::size_t>(state.range(0));
  const auto raters = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> pools(images, std::vector<double>(raters));
  for (auto& pool : pools) {
    const double signal = normal(gen);
    for (auto& v : pool) v = signal + normal(gen);
  }
  for (auto _ : state) {
    auto estimate = probe::splithalf_reliability(pools, 100, 7);
    benchmark::DoNotOptimize(estimate.r_sb);
  }
}
BENCHMARK(BM_SplitHalf)->Args({900, 100})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

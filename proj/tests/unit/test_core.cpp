#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "probe/error.hpp"
#include "probe/numeric.hpp"
#include "probe/parallel.hpp"
#include "probe/rng.hpp"

using namespace probe;

TEST_SUITE("rng") {
  TEST_CASE("mix64 is the SplitMix64 finalizer") {
    // First SplitMix64 output for state 0.
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
  }

  TEST_CASE("streams are reproducible and distinct") {
    Rng a(5, 1);
    Rng b(5, 1);
    Rng c(5, 2);
    Rng d(6, 1);
    const auto first = a();
    CHECK(first == b());
    CHECK(first != c());
    CHECK(first != d());
  }

  TEST_CASE("below stays in range and is roughly uniform") {
    Rng rng(42);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
    CHECK(rng.below(1) == 0);
    CHECK(rng.below(0) == 0);
  }

  TEST_CASE("uniform lies in [0, 1)") {
    Rng rng(1);
    double total = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      total += u;
    }
    CHECK(total / 10000.0 == doctest::Approx(0.5).epsilon(0.02));
    CHECK(unit_interval(~0ULL) < 1.0);
  }
}

TEST_SUITE("parallel_for") {
  TEST_CASE("visits every index once") {
    for (std::size_t workers : {1, 2, 8}) {
      std::vector<std::atomic<int>> hits(1000);
      parallel_for(1000, workers, [&](std::size_t i) { ++hits[i]; });
      for (const auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
  }

  TEST_CASE("rethrows the lowest failing index") {
    for (std::size_t workers : {1, 4}) {
      try {
        parallel_for(100, workers, [](std::size_t i) {
          if (i == 70 || i == 30) throw DataError("bad " + std::to_string(i));
        });
        FAIL("no exception");
      } catch (const DataError& e) {
        CHECK(std::string(e.what()) == "bad 30");
      }
    }
  }

  TEST_CASE("environment override") {
    CHECK(resolve_workers(3) >= 1);
    ::setenv("PROBE_WORKERS", "5", 1);
    CHECK(resolve_workers(1) == 5);
    ::setenv("PROBE_WORKERS", "junk", 1);
    CHECK_THROWS_AS(resolve_workers(1), ConfigError);
    ::unsetenv("PROBE_WORKERS");
    CHECK(resolve_workers(2) == 2);
    CHECK(resolve_workers(0) >= 1);
  }
}

TEST_SUITE("numeric") {
  TEST_CASE("stable_mean is exact for constant input") {
    const std::vector<double> v(1001, 0.1);
    CHECK(stable_mean(v) == 0.1);
    const std::vector<double> w{1, 2, 3, 4};
    CHECK(stable_mean(w) == 2.5);
  }

  TEST_CASE("percentile interpolates linearly") {
    const std::vector<double> v{4, 1, 3, 2, 5};
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 1.0) == 5.0);
    CHECK(percentile(v, 0.5) == 3.0);
    CHECK(percentile(v, 0.1) == doctest::Approx(1.4));
    std::vector<double> r(101);
    std::iota(r.begin(), r.end(), 0.0);
    const auto ci = percentile_interval(r);
    CHECK(ci.lower == doctest::Approx(2.5));
    CHECK(ci.upper == doctest::Approx(97.5));
  }

  TEST_CASE("error kinds map to exit codes") {
    CHECK(exit_code(ErrorKind::config) == 2);
    CHECK(exit_code(ErrorKind::data) == 3);
    CHECK(exit_code(ErrorKind::numerical) == 4);
  }
}

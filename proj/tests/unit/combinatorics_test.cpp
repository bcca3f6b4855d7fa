#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "oracle.hpp"
#include "tricluster/combinatorics.hpp"

namespace tricluster {
namespace {

TEST(Combinatorics, LogFactorialMatchesLgamma) {
  for (std::uint64_t n : {0ull, 1ull, 2ull, 10ull, 171ull, 5000ull, 123456ull, 10000000ull}) {
    EXPECT_NEAR(log_factorial(n), std::lgamma(n + 1.0), 1e-12 * std::max(1.0, std::lgamma(n + 1.0)));
  }
}

TEST(Combinatorics, FactorialRatioStaysAccurateForCloseHugeArguments) {
  const std::uint64_t b = 4'000'000'000ull;
  double expect = 0.0;
  for (std::uint64_t i = b + 1; i <= b + 3; ++i) expect += std::log(static_cast<double>(i));
  EXPECT_NEAR(log_factorial_ratio(b + 3, b), expect, 1e-12 * expect);
  EXPECT_NEAR(log_factorial_ratio(b, b + 3), -expect, 1e-12 * expect);
  EXPECT_EQ(log_factorial_ratio(77, 77), 0.0);
}

TEST(Combinatorics, BinomialValuesAndDomain) {
  EXPECT_NEAR(log_binomial(10, 3), std::log(120.0), 1e-12);
  EXPECT_EQ(log_binomial(7, 0), 0.0);
  EXPECT_EQ(log_binomial(7, 7), 0.0);
  EXPECT_THROW(log_binomial(3, 4), std::domain_error);
  EXPECT_THROW(log_binomial(3, -1), std::domain_error);
}

TEST(Combinatorics, CumulativeStirlingKnownValues) {
  EXPECT_NEAR(log_cumulative_stirling(10, 10), std::log(115975.0), 1e-12);
  EXPECT_NEAR(log_cumulative_stirling(5, 2), std::log(16.0), 1e-12);  // 1 + 15
  EXPECT_EQ(log_cumulative_stirling(9, 1), 0.0);
  EXPECT_THROW(log_cumulative_stirling(4, 0), std::domain_error);
  EXPECT_THROW(log_cumulative_stirling(4, 5), std::domain_error);
}

TEST(Combinatorics, CumulativeStirlingMatchesOracleRecurrence) {
  for (std::uint32_t n : {1u, 2u, 7u, 40u, 333u, 1000u}) {
    for (std::uint32_t k = 1; k <= n; k += std::max(1u, n / 13)) {
      const double want = testing::oracle_log_bell_partial(n, k);
      EXPECT_NEAR(log_cumulative_stirling(n, k), want, 1e-9 * std::max(1.0, want))
          << n << "," << k;
    }
  }
}

TEST(Combinatorics, SaddlePointTracksExactRow) {
  const std::uint64_t n = 3000;
  const auto exact = detail::log_stirling_row_exact(n);
  for (std::uint64_t k : {1ull, 2ull, 10ull, 100ull, 1500ull, 2990ull, 2999ull, 3000ull}) {
    EXPECT_NEAR(detail::log_stirling_saddle(n, k), exact[k], 1e-4 * std::max(1.0, exact[k])) << k;
  }
  EXPECT_NEAR(detail::log_stirling_saddle(n, 1), 0.0, 1e-12);
  EXPECT_NEAR(detail::log_stirling_saddle(n, n), 0.0, 1e-12);
}

TEST(Combinatorics, ApproximateRegimeIsMonotoneInK) {
  const std::uint64_t n = kExactStirlingLimit + 500;
  EXPECT_FALSE(stirling_is_exact(n));
  double prev = log_cumulative_stirling(static_cast<std::int64_t>(n), 1);
  for (std::uint64_t k = 2; k <= n; k += 97) {
    const double v = log_cumulative_stirling(static_cast<std::int64_t>(n), static_cast<std::int64_t>(k));
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Combinatorics, ConcurrentReservesSeeConsistentTables) {
  CombinatoricsTable table;
  std::vector<std::thread> pool;
  std::vector<double> seen(4, 0.0);
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t n = 100; n < 200000; n *= 3) {
        auto span = table.reserve(n + t);
        seen[t] = span[n];
      }
    });
  }
  for (auto& th : pool) th.join();
  auto full = table.reserve(200000);
  for (int t = 0; t < 4; ++t) EXPECT_DOUBLE_EQ(seen[t], full[72900]);
}

}  // namespace
}  // namespace tricluster

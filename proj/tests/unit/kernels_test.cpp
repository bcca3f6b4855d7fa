#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tricluster/combinatorics.hpp"
#include "tricluster/kernels.hpp"
#include "tricluster/rng.hpp"

namespace tricluster {
namespace {

std::vector<std::uint32_t> random_counts(Rng& rng, std::size_t n, std::uint32_t max) {
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng.below(max + 1));
  return v;
}

TEST(Kernels, ScalarMatchesDirectSum) {
  auto table = CombinatoricsTable::shared().reserve(2000);
  Rng rng(5);
  for (std::size_t n : {0u, 1u, 3u, 17u, 250u}) {
    auto c = random_counts(rng, n, 999);
    double expect = 0.0;
    for (auto x : c) expect += std::lgamma(x + 1.0);
    EXPECT_NEAR(kernels::scalar::sum_log_factorial(c, table), expect,
                1e-9 * std::max(1.0, expect));
  }
}

TEST(Kernels, MergeGainMatchesDefinition) {
  auto table = CombinatoricsTable::shared().reserve(2000);
  Rng rng(6);
  auto a = random_counts(rng, 61, 900);
  auto b = random_counts(rng, 61, 900);
  double expect = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    expect += std::lgamma(a[i] + b[i] + 1.0) - std::lgamma(a[i] + 1.0) - std::lgamma(b[i] + 1.0);
  }
  EXPECT_NEAR(kernels::scalar::sum_merge_gain(a, b, table), expect, 1e-8);
}

TEST(Kernels, Avx2AgreesWithScalarOnEveryLength) {
  if (!kernels::avx2::available()) GTEST_SKIP() << "no AVX2 on this machine";
  auto table = CombinatoricsTable::shared().reserve(1 << 17);
  Rng rng(7);
  for (std::size_t n = 0; n < 70; ++n) {
    for (std::uint32_t max : {1u, 40u, 60000u}) {
      auto a = random_counts(rng, n, max);
      auto b = random_counts(rng, n, max);
      const double s = kernels::scalar::sum_log_factorial(a, table);
      EXPECT_NEAR(kernels::avx2::sum_log_factorial(a, table), s, 1e-12 * std::max(1.0, s));
      const double g = kernels::scalar::sum_merge_gain(a, b, table);
      EXPECT_NEAR(kernels::avx2::sum_merge_gain(a, b, table), g, 1e-12 * std::max(1.0, g));
    }
  }
}

TEST(Kernels, DispatchReportsAnIsa) {
  const auto isa = kernels::active_isa();
  EXPECT_FALSE(kernels::isa_name(isa).empty());
  if (isa == kernels::Isa::avx2) EXPECT_TRUE(kernels::avx2::available());
}

}  // namespace
}  // namespace tricluster

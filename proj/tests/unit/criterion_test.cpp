#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracle.hpp"
#include "tricluster/combinatorics.hpp"
#include "tricluster/criterion.hpp"

namespace tricluster {
namespace {

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

TEST(Criterion, EveryTermMatchesTheOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    auto g = testing::random_graph(rng, {9, 9, 1, 60, 12});
    auto m = testing::random_model(g, rng);
    const auto got = cost(m);
    const auto want = testing::oracle_cost(g, m);
    EXPECT_NEAR(got.prior_counts, want.prior_counts, tol(want.prior_counts));
    EXPECT_NEAR(got.prior_partitions, want.prior_partitions, tol(want.prior_partitions));
    EXPECT_NEAR(got.prior_cells, want.prior_cells, tol(want.prior_cells));
    EXPECT_NEAR(got.prior_degrees, want.prior_degrees, tol(want.prior_degrees));
    EXPECT_NEAR(got.lik_cells, want.lik_cells, tol(want.lik_cells));
    EXPECT_NEAR(got.lik_degrees, want.lik_degrees, tol(want.lik_degrees));
    EXPECT_NEAR(got.lik_time, want.lik_time, tol(want.lik_time));
    EXPECT_NEAR(got.total, want.total(), tol(want.total()));
    EXPECT_NEAR(got.prior() + got.likelihood(), got.total, tol(got.total));
    EXPECT_FALSE(got.stirling_approximate);
  }
}

TEST(Criterion, SingleEdgeGraphCostsNothing) {
  auto g = build_graph_indexed({"a"}, {"b"}, {{0, 0, 4.0}});
  EXPECT_DOUBLE_EQ(cost(finest_model(g)).total, 0.0);
}

TEST(Criterion, LargeSidesSwitchToApproximation) {
  const std::uint32_t n = static_cast<std::uint32_t>(kExactStirlingLimit + 10);
  std::vector<std::string> names;
  std::vector<TemporalGraph::Edge> edges;
  for (std::uint32_t v = 0; v < n; ++v) {
    names.push_back(std::to_string(v));
    edges.push_back({v, 0, static_cast<double>(v % 3)});
  }
  auto g = build_graph_indexed(names, {"t"}, edges);
  const auto c = cost(null_model(g));
  EXPECT_TRUE(c.stirling_approximate);
  EXPECT_TRUE(std::isfinite(c.total));
}

TEST(Criterion, PriorCellsChangeIsADifference) {
  for (std::uint64_t e : {1ull, 10ull, 100000ull}) {
    for (std::uint64_t before : {1ull, 7ull, 900ull}) {
      for (std::uint64_t after : {1ull, 6ull, 1000ull}) {
        EXPECT_NEAR(prior_cells_change(e, before, after),
                    prior_cells_term(e, after) - prior_cells_term(e, before), 1e-7);
      }
    }
  }
  EXPECT_NEAR(prior_cells_term(2, 4), std::log(10.0), 1e-12);
}

TEST(Criterion, MergeDeltasMatchRecomputation) {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    auto g = testing::random_graph(rng, {8, 8, 2, 50, 10});
    auto m = testing::random_model(g, rng);
    const double base = cost(m).total;
    MergeEvaluator eval(m);
    for (const auto& cand : eval.enumerate()) {
      const auto& p = cand.proposal;
      const double after = cost(apply_merge(m, p)).total;
      EXPECT_NEAR(p.delta, after - base, tol(base));
      const double common = eval.common_delta(p.kind, m.source_clusters(),
                                              m.target_clusters(), m.segments());
      EXPECT_NEAR(common + cand.local, p.delta, tol(base));
      MergeProposal direct = p.kind == MergeKind::segment
                                 ? delta_cost_merge_segments(m, p.a)
                                 : delta_cost_merge_clusters(m, p.kind == MergeKind::source
                                                                    ? Side::source : Side::target,
                                                             p.a, p.b);
      EXPECT_NEAR(direct.delta, p.delta, tol(base));
    }
  }
}

TEST(Criterion, EnumerateCoversEveryCandidateOnce) {
  Rng rng(23);
  auto g = testing::random_graph(rng, {7, 6, 30, 40, 10});
  auto m = finest_model(g);
  MergeEvaluator eval(m);
  const auto all = eval.enumerate();
  const std::uint64_t ks = m.source_clusters(), kt = m.target_clusters(), n = m.segments();
  EXPECT_EQ(all.size(), ks * (ks - 1) / 2 + kt * (kt - 1) / 2 + (n - 1));
  EXPECT_EQ(eval.enumerate(MergeKind::segment).size(), n - 1);
  for (const auto& c : all) EXPECT_LT(c.proposal.a, c.proposal.b);
}

TEST(Criterion, OperandErrors) {
  Rng rng(24);
  auto g = testing::random_graph(rng, {4, 4, 8, 8, 4});
  auto m = finest_model(g);
  MergeEvaluator eval(m);
  EXPECT_THROW(eval.evaluate(MergeKind::source, 0, 0), std::invalid_argument);
  EXPECT_THROW(eval.evaluate(MergeKind::source, 0, 99), std::out_of_range);
  EXPECT_THROW(delta_cost_merge_clusters(m, Side::target, 1, 1), std::invalid_argument);
  EXPECT_THROW(delta_cost_merge_segments(m, m.segments() - 1), std::out_of_range);
  if (m.segments() >= 3) {
    EXPECT_THROW(eval.evaluate(MergeKind::segment, 0, 2), std::invalid_argument);
  }
}

// Merge order does not matter: two disjoint merges applied in either order
// reach the same cost, and each keeps its own local part.
TEST(Criterion, DisjointMergesCommute) {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = testing::random_graph(rng, {8, 3, 20, 40, 6});
    auto m = finest_model(g);
    if (m.source_clusters() < 4) continue;
    auto first = delta_cost_merge_clusters(m, Side::source, 0, 1);
    auto second = delta_cost_merge_clusters(m, Side::source, 2, 3);
    const double ab = cost(apply_merge(apply_merge(m, second), first)).total;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs{{0, 1}, {2, 3}};
    const double batched = cost(apply_merges(m, MergeKind::source, pairs, 0.0)).total;
    EXPECT_NEAR(ab, batched, tol(ab));
    MergeEvaluator eval(m);
    const double common_two = eval.common_delta(MergeKind::source, m.source_clusters() - 1,
                                                m.target_clusters(), m.segments());
    const double predicted = cost(m).total + first.delta +
                             common_two + eval.evaluate(MergeKind::source, 2, 3).local;
    EXPECT_NEAR(predicted, batched, tol(batched));
  }
}

}  // namespace
}  // namespace tricluster

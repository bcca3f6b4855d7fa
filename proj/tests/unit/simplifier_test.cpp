#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "oracle.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/optimizer.hpp"
#include "tricluster/simplifier.hpp"
#include "tricluster/synthgen.hpp"

namespace tricluster {
namespace {

ImageGraphModel fitted(std::uint64_t edges, std::uint64_t seed) {
  auto spec = PatternSpec::standard();
  spec.num_edges = edges;
  spec.seed = seed;
  auto data = generate_patterned(spec);
  OptimizerConfig config;
  config.vns_restarts = 2;
  config.seed = seed;
  return vns_optimize(data.graph, config);
}

TEST(Informativity, Endpoints) {
  EXPECT_DOUBLE_EQ(informativity(10.0, 10.0, 30.0), 1.0);
  EXPECT_DOUBLE_EQ(informativity(30.0, 10.0, 30.0), 0.0);
  EXPECT_DOUBLE_EQ(informativity(20.0, 10.0, 30.0), 0.5);
  EXPECT_THROW(informativity(5.0, 30.0, 30.0), NoStructureError);
}

TEST(Coarsening, FullTraceEndsAtTheNullModel) {
  auto m = fitted(1024, 3);
  ASSERT_GT(m.source_clusters() + m.target_clusters() + m.segments(), 3u);
  auto trace = coarsen_fully(m);
  EXPECT_EQ(trace.steps.size(),
            m.source_clusters() + m.target_clusters() + m.segments() - 3u);
  EXPECT_DOUBLE_EQ(trace.origin_cost, cost(m).total);
  EXPECT_NEAR(trace.steps.back().total_cost, trace.null_cost, 1e-9 * trace.null_cost);
  EXPECT_NEAR(trace.steps.back().tau, 0.0, 1e-9);
  ImageGraphModel replay = m;
  for (const auto& step : trace.steps) {
    replay = apply_merge(replay, step.merge);
    EXPECT_NEAR(cost(replay).total, step.total_cost, 1e-9 * step.total_cost);
  }
}

TEST(Coarsening, StopsAtTheLastModelAboveTarget) {
  auto m = fitted(2048, 4);
  auto full = coarsen_fully(m);
  for (double target : {0.99, 0.9, 0.5, 0.2}) {
    auto [coarse, trace] = coarsen_to_informativity(m, target);
    for (const auto& s : trace.steps) EXPECT_GE(s.tau, target);
    ASSERT_LE(trace.steps.size(), full.steps.size());
    if (trace.steps.size() < full.steps.size()) {
      EXPECT_LT(full.steps[trace.steps.size()].tau, target);
    }
    const double tau = informativity(coarse, trace.origin_cost, trace.null_cost);
    EXPECT_GE(tau, target - 1e-12);
  }
}

// Each recorded step is the cheapest merge available at that point.
TEST(Coarsening, EveryStepIsTheLeastCostlyMerge) {
  auto m = fitted(4096, 7);
  auto [coarse, trace] = coarsen_to_informativity(m, 0.5);
  ASSERT_FALSE(trace.steps.empty());
  ImageGraphModel current = m;
  double prev_tau = 1.0;
  for (const auto& step : trace.steps) {
    double least = INFINITY;
    for (const auto& c : MergeEvaluator(current).enumerate()) least = std::min(least, c.proposal.delta);
    EXPECT_DOUBLE_EQ(step.merge.delta, least);
    EXPECT_LE(step.tau, prev_tau);
    prev_tau = step.tau;
    current = apply_merge(current, step.merge);
  }
}

TEST(Coarsening, TargetValidation) {
  auto m = fitted(1024, 5);
  EXPECT_THROW(coarsen_to_informativity(m, 0.0), std::invalid_argument);
  EXPECT_THROW(coarsen_to_informativity(m, 1.5), std::invalid_argument);
  auto [same, trace] = coarsen_to_informativity(m, 1.0);
  EXPECT_TRUE(trace.steps.empty());
  EXPECT_EQ(same.source_partition(), m.source_partition());
}

TEST(Coarsening, NullModelHasNoInformativity) {
  Rng rng(51);
  auto g = testing::random_graph(rng, {5, 5, 8, 8, 4});
  EXPECT_THROW(coarsen_fully(null_model(g)), NoStructureError);
}

TEST(JsDivergence, KnownValues) {
  std::vector<double> p{0.5, 0.5}, q{1.0, 0.0}, r{0.0, 1.0};
  EXPECT_DOUBLE_EQ(js_divergence(p, p, 0.3, 0.7), 0.0);
  EXPECT_NEAR(js_divergence(q, r, 0.5, 0.5), std::log(2.0), 1e-15);
  // Degenerate weight: JS collapses to zero.
  EXPECT_NEAR(js_divergence(q, r, 1.0, 0.0), 0.0, 1e-15);
  EXPECT_THROW(js_divergence(p, {q.data(), 1}, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(js_divergence(p, q, 0.6, 0.6), std::invalid_argument);
  std::vector<double> bad{0.7, 0.7};
  EXPECT_THROW(js_divergence(bad, q, 0.5, 0.5), std::invalid_argument);
}

TEST(JsDivergence, BoundedByEntropyOfWeights) {
  Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> p(6), q(6);
    double sp = 0, sq = 0;
    for (auto& x : p) sp += (x = rng.unit());
    for (auto& x : q) sq += (x = rng.unit());
    for (auto& x : p) x /= sp;
    for (auto& x : q) x /= sq;
    const double a = rng.unit();
    const double js = js_divergence(p, q, a, 1 - a);
    const double h = -(a > 0 ? a * std::log(a) : 0) - (a < 1 ? (1 - a) * std::log(1 - a) : 0);
    EXPECT_GE(js, 0.0);
    EXPECT_LE(js, h + 1e-12);
  }
}

TEST(MergeDivergence, ExactPartIsTheMergeDelta) {
  auto m = fitted(2048, 6);
  ASSERT_GE(m.source_clusters(), 2u);
  auto d = merge_divergence(m, MergeKind::source, 0, 1);
  EXPECT_DOUBLE_EQ(d.exact.delta, delta_cost_merge_clusters(m, Side::source, 0, 1).delta);
  EXPECT_NEAR(d.approx_edge_mass, d.edge_mass * d.js, 1e-9);
  EXPECT_EQ(d.vertex_count, m.source_sizes()[0] + m.source_sizes()[1]);
  EXPECT_GT(d.exact.delta, 0.0);
}

}  // namespace
}  // namespace tricluster

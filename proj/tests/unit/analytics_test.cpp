#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"
#include "tricluster/analytics.hpp"

namespace tricluster {
namespace {

// Builds a one-segment graph whose cluster-pair counts are `table` under
// the finest model.
TemporalGraph from_table(const std::vector<std::vector<std::uint32_t>>& table) {
  std::vector<std::string> s, t;
  for (std::size_t i = 0; i < table.size(); ++i) s.push_back("s" + std::to_string(i));
  for (std::size_t j = 0; j < table[0].size(); ++j) t.push_back("t" + std::to_string(j));
  std::vector<TemporalGraph::Edge> edges;
  for (std::uint32_t i = 0; i < table.size(); ++i) {
    for (std::uint32_t j = 0; j < table[i].size(); ++j) {
      for (std::uint32_t k = 0; k < table[i][j]; ++k) edges.push_back({i, j, 0.0});
    }
  }
  return build_graph_indexed(s, t, edges);
}

double sum_contributions(const MIReport& r) {
  double s = 0.0;
  for (const auto& e : r.entries) s += e.contribution;
  return s;
}

TEST(Analytics, DiagonalTwoByTwoIsLogTwo) {
  auto m = finest_model(from_table({{5, 0}, {0, 5}}));
  const auto r = mutual_info_clusters(m);
  EXPECT_NEAR(r.total_mi, std::log(2.0), 1e-15);
  EXPECT_NEAR(in_bits(r).total_mi, 1.0, 1e-15);
  ASSERT_EQ(r.entries.size(), 4u);
  EXPECT_EQ(r.entries[1].contribution, 0.0);
  EXPECT_DOUBLE_EQ(r.entries[0].expected_p, 0.25);
}

TEST(Analytics, RankOneTableIsExactlyZero) {
  // Outer product of (1, 3, 2) and (2, 5): every cell satisfies x E = u v.
  auto m = finest_model(from_table({{2, 5}, {6, 15}, {4, 10}}));
  const auto r = mutual_info_clusters(m);
  EXPECT_EQ(r.total_mi, 0.0);
  for (const auto& e : r.entries) EXPECT_EQ(e.contribution, 0.0);
}

TEST(Analytics, SingleSegmentTimeAnalysisIsExactlyZero) {
  Rng rng(61);
  auto g = testing::random_graph(rng, {6, 6, 20, 40, 8});
  auto m = model_from_graph(g, Partition::singletons(g.num_sources()),
                            Partition::singletons(g.num_targets()), {0});
  const auto r = mutual_info_time(m);
  EXPECT_TRUE(r.over_time);
  EXPECT_EQ(r.total_mi, 0.0);
}

TEST(Analytics, MatchesDirectComputationOnRandomModels) {
  Rng rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = testing::random_graph(rng, {8, 8, 1, 80, 10});
    auto m = testing::random_model(g, rng);
    const double e = static_cast<double>(g.num_edges());
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> pair;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::map<std::uint32_t, double>> cube;
    std::vector<double> ps(m.source_clusters()), pt(m.target_clusters()), pn(m.segments());
    for (const auto& c : m.cells()) {
      pair[{c.source, c.target}] += c.count;
      cube[{c.source, c.target}][c.segment] += c.count;
      ps[c.source] += c.count;
      pt[c.target] += c.count;
      pn[c.segment] += c.count;
    }
    double mi_pairs = 0.0, mi_time = 0.0;
    for (const auto& [k, x] : pair) mi_pairs += x / e * std::log(x * e / (ps[k.first] * pt[k.second]));
    for (const auto& [k, row] : cube) {
      for (const auto& [n, x] : row) mi_time += x / e * std::log(x * e / (pair[k] * pn[n]));
    }
    const auto rp = mutual_info_clusters(m);
    const auto rt = mutual_info_time(m);
    EXPECT_NEAR(rp.total_mi, std::max(0.0, mi_pairs), 1e-9);
    EXPECT_NEAR(rt.total_mi, std::max(0.0, mi_time), 1e-9);
    EXPECT_GE(rp.total_mi, 0.0);
    EXPECT_GE(rt.total_mi, 0.0);
    EXPECT_NEAR(sum_contributions(rp), rp.total_mi, 1e-9);
    EXPECT_NEAR(sum_contributions(rt), rt.total_mi, 1e-9);
    EXPECT_EQ(rp.entries.size(), std::size_t{m.source_clusters()} * m.target_clusters());
    EXPECT_EQ(rt.entries.size(),
              std::size_t{m.source_clusters()} * m.target_clusters() * m.segments());
  }
}

TEST(Analytics, BitsScaleEveryContribution) {
  auto m = finest_model(from_table({{3, 1}, {1, 3}}));
  const auto nats = mutual_info_clusters(m);
  const auto bits = in_bits(nats);
  for (std::size_t i = 0; i < nats.entries.size(); ++i) {
    EXPECT_NEAR(bits.entries[i].contribution, nats.entries[i].contribution / std::log(2.0), 1e-15);
    EXPECT_EQ(bits.entries[i].joint_p, nats.entries[i].joint_p);
  }
}

}  // namespace
}  // namespace tricluster

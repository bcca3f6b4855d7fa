#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tricluster/synthgen.hpp"

namespace tricluster {
namespace {

TEST(Synthgen, StandardSpecShape) {
  auto spec = PatternSpec::standard();
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.vertex_count(), 40u);
  EXPECT_EQ(spec.interval_count(), 4u);
}

TEST(Synthgen, ValidationCatchesBrokenSpecs) {
  auto spec = PatternSpec::standard();
  spec.noise_fraction = 1.5;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = PatternSpec::standard();
  spec.bounds[2] = spec.bounds[1];
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = PatternSpec::standard();
  spec.images[0][0] = {9};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = PatternSpec::standard();
  spec.num_edges = 0;
  EXPECT_THROW(generate_patterned(spec), std::invalid_argument);
}

TEST(Synthgen, PatternedEdgesFollowTheImages) {
  auto spec = PatternSpec::standard();
  spec.num_edges = 3000;
  spec.seed = 17;
  auto data = generate_patterned(spec);
  const auto& g = data.graph;
  ASSERT_EQ(g.num_edges(), 3000u);
  EXPECT_EQ(g.num_sources(), 40u);
  EXPECT_EQ(g.num_targets(), 40u);
  const auto rewired = std::count(data.truth.edge_rewired.begin(), data.truth.edge_rewired.end(), true);
  EXPECT_EQ(rewired, 900);
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const auto& e = g.edges()[i];
    const auto k = data.truth.edge_interval[i];
    EXPECT_GE(e.timestamp, spec.bounds[k]);
    EXPECT_LE(e.timestamp, spec.bounds[k + 1]);
    const auto cs = data.truth.vertex_cluster[e.source];
    const auto& image = spec.images[k][cs];
    EXPECT_FALSE(image.empty());
    if (!data.truth.edge_rewired[i]) {
      const auto ct = data.truth.vertex_cluster[e.target];
      EXPECT_NE(std::find(image.begin(), image.end(), ct), image.end());
    }
  }
}

TEST(Synthgen, DeterministicPerSeed) {
  auto spec = PatternSpec::standard();
  spec.num_edges = 500;
  auto a = generate_patterned(spec);
  auto b = generate_patterned(spec);
  spec.seed = 2;
  auto c = generate_patterned(spec);
  std::ostringstream sa, sb, sc;
  write_ground_truth(sa, a);
  write_ground_truth(sb, b);
  write_ground_truth(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
}

std::vector<double> sorted_times(const TemporalGraph& g) {
  std::vector<double> t;
  for (const auto& e : g.edges()) t.push_back(e.timestamp);
  std::sort(t.begin(), t.end());
  return t;
}

TEST(Synthgen, ShuffleKeepsPairsAndTimestamps) {
  auto spec = PatternSpec::standard();
  spec.num_edges = 800;
  auto g = generate_patterned(spec).graph;
  auto s = shuffle_timestamps(g, 3);
  ASSERT_EQ(s.num_edges(), g.num_edges());
  EXPECT_EQ(sorted_times(s), sorted_times(g));
  std::size_t moved = 0;
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    EXPECT_EQ(s.edges()[i].source, g.edges()[i].source);
    EXPECT_EQ(s.edges()[i].target, g.edges()[i].target);
    moved += s.edges()[i].timestamp != g.edges()[i].timestamp;
  }
  EXPECT_GT(moved, g.num_edges() / 2);
}

TEST(Synthgen, RewireKeepsTimestampsAndVertexSets) {
  auto spec = PatternSpec::standard();
  spec.num_edges = 800;
  auto g = generate_patterned(spec).graph;
  auto r = rewire_all(g, 4);
  EXPECT_EQ(r.num_sources(), g.num_sources());
  EXPECT_EQ(r.num_targets(), g.num_targets());
  EXPECT_EQ(sorted_times(r), sorted_times(g));
  std::size_t same = 0;
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    same += r.edges()[i].source == g.edges()[i].source &&
            r.edges()[i].target == g.edges()[i].target;
  }
  EXPECT_LT(same, g.num_edges() / 10);
}

}  // namespace
}  // namespace tricluster

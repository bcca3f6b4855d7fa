#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/optimizer.hpp"

namespace tricluster {
namespace {

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

double relabelled_cost(const TemporalGraph& g, std::vector<std::uint32_t> src,
                       std::vector<std::uint32_t> tgt, std::vector<std::uint32_t> starts) {
  return testing::oracle_cost(g, src, tgt, starts).total();
}

TEST(LocalSearch, NeverWorsensAndCachesExactCost) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = testing::random_graph(rng, {10, 10, 5, 80, 15});
    auto m = testing::random_model(g, rng);
    const double before = cost(m).total;
    auto out = improve_locally(g, m);
    EXPECT_NO_THROW(out.validate());
    ASSERT_TRUE(out.cached_cost().has_value());
    EXPECT_NEAR(*out.cached_cost(), cost(out).total, tol(before));
    EXPECT_LE(*out.cached_cost(), before + tol(before));
    EXPECT_LE(out.source_clusters(), m.source_clusters());
    EXPECT_EQ(out.segments(), m.segments());
  }
}

// At convergence no single vertex move to another existing cluster and no
// boundary shift to another tie run inside its two segments lowers the cost.
TEST(LocalSearch, ConvergedModelIsOneMoveOptimal) {
  Rng rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = testing::random_graph(rng, {7, 7, 5, 60, 12});
    auto out = improve_locally(g, testing::random_model(g, rng), 1000);
    const auto src = out.source_partition().assignment;
    const auto tgt = out.target_partition().assignment;
    const auto starts = out.segmentation().starts;
    const double here = cost(out).total;
    for (int side = 0; side < 2; ++side) {
      const auto& labels = side == 0 ? src : tgt;
      const std::uint32_t k = side == 0 ? out.source_clusters() : out.target_clusters();
      for (std::size_t v = 0; v < labels.size(); ++v) {
        for (std::uint32_t b = 0; b < k; ++b) {
          if (b == labels[v]) continue;
          auto moved = labels;
          moved[v] = b;
          const double c = side == 0 ? relabelled_cost(g, moved, tgt, starts)
                                     : relabelled_cost(g, src, moved, starts);
          EXPECT_GE(c, here - 1e-8) << "vertex " << v << " side " << side;
        }
      }
    }
    const auto runs = g.tie_run_starts();
    for (std::size_t n = 1; n < starts.size(); ++n) {
      const std::uint32_t lo = starts[n - 1];
      const std::uint32_t hi = n + 1 < starts.size() ? starts[n + 1] : g.num_edges();
      for (auto r : runs) {
        if (r <= lo || r >= hi || r == starts[n]) continue;
        auto shifted = starts;
        shifted[n] = r;
        EXPECT_GE(relabelled_cost(g, src, tgt, shifted), here - 1e-8);
      }
    }
  }
}

TEST(LocalSearch, RepairsAMisplacedVertex) {
  // Two blocks a*->x* and b*->y*, with one source vertex put in the wrong cluster.
  std::vector<std::string> s{"a0", "a1", "a2", "b0", "b1", "b2"}, t{"x0", "x1", "y0", "y1"};
  std::vector<TemporalGraph::Edge> edges;
  Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const auto u = static_cast<VertexIndex>(rng.below(6));
    const auto w = static_cast<VertexIndex>((u < 3 ? 0 : 2) + rng.below(2));
    edges.push_back({u, w, static_cast<double>(i)});
  }
  auto g = build_graph_indexed(s, t, edges);
  std::vector<std::uint32_t> wrong{0, 0, 1, 1, 1, 1}, right{0, 0, 0, 1, 1, 1}, tgt{0, 0, 1, 1};
  auto m = model_from_graph(g, Partition::from_labels(wrong), Partition::from_labels(tgt), {0});
  auto out = improve_locally(g, m);
  EXPECT_EQ(out.source_partition(), Partition::from_labels(right));
}

}  // namespace
}  // namespace tricluster

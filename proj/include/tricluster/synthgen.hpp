#pragma once

// Artificial temporal graphs with planted structure, plus the two
// randomisations that destroy it: timestamp shuffling (no temporal pattern)
// and full rewiring (no pattern at all).

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tricluster/temporal_graph.hpp"

namespace tricluster {

struct PatternSpec {
  // Vertices are shared by both sides and numbered cluster after cluster.
  std::vector<std::uint32_t> cluster_sizes;
  // Interval k is [bounds[k], bounds[k+1]); the last one is closed.
  std::vector<double> bounds;
  // images[k][i]: target clusters reachable from source cluster i during
  // interval k. An empty set disconnects the cluster for that interval.
  std::vector<std::vector<std::vector<std::uint32_t>>> images;
  double noise_fraction = 0.3;
  std::uint64_t num_edges = 8192;
  std::uint64_t seed = 1;

  // 40 vertices in clusters of 5, 5, 10 and 20 over [0, 100], split at 20,
  // 30 and 60, each interval wiring the clusters differently, 30% noise.
  static PatternSpec standard();

  std::size_t vertex_count() const;
  std::size_t interval_count() const { return images.size(); }
  // Throws std::invalid_argument.
  void validate() const;
};

struct GroundTruth {
  std::vector<std::uint32_t> vertex_cluster;
  // Per input edge.
  std::vector<std::uint32_t> edge_interval;
  std::vector<bool> edge_rewired;
};

struct SyntheticGraph {
  TemporalGraph graph;
  GroundTruth truth;
};

// Draws a source vertex and a timestamp uniformly, redrawing both while the
// source's cluster is disconnected in that interval, then a target uniformly
// among the vertices of the reachable clusters. Finally the targets of
// floor(noise_fraction * num_edges) distinct edges are redrawn uniformly.
SyntheticGraph generate_patterned(const PatternSpec& spec);

// Same (source, target) pairs and same timestamps, randomly reassigned.
TemporalGraph shuffle_timestamps(const TemporalGraph& graph, std::uint64_t seed);

// Every edge gets a uniform source and target; timestamps are kept.
TemporalGraph rewire_all(const TemporalGraph& graph, std::uint64_t seed);

// Two tab-separated sections: `vertex cluster` lines, then per edge in input
// order `source target timestamp interval rewired`.
void write_ground_truth(std::ostream& out, const SyntheticGraph& data);

}  // namespace tricluster

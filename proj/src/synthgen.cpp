#include "tricluster/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "tricluster/rng.hpp"

namespace tricluster {

namespace {

// Stream ids keep the three generators' draws independent for one seed.
constexpr std::uint64_t kPatternStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kRewireStream = 4;

std::vector<std::string> vertex_names(std::size_t n) {
  std::vector<std::string> names(n);
  for (std::size_t v = 0; v < n; ++v) names[v] = "v" + std::to_string(v);
  return names;
}

}  // namespace

PatternSpec PatternSpec::standard() {
  PatternSpec spec;
  spec.cluster_sizes = {5, 5, 10, 20};
  spec.bounds = {0.0, 20.0, 30.0, 60.0, 100.0};
  spec.images = {
      {{1}, {0}, {3}, {2}},
      {{}, {0, 1}, {2}, {3}},
      {{2}, {3}, {0}, {1}},
      {{3}, {2}, {1}, {0}},
  };
  return spec;
}

std::size_t PatternSpec::vertex_count() const {
  return std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0});
}

void PatternSpec::validate() const {
  if (cluster_sizes.empty()) throw std::invalid_argument("no clusters");
  for (auto s : cluster_sizes) {
    if (s == 0) throw std::invalid_argument("empty ground-truth cluster");
  }
  if (images.empty() || bounds.size() != images.size() + 1) {
    throw std::invalid_argument("need one image graph per interval");
  }
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    if (!(bounds[k] < bounds[k + 1]) || !std::isfinite(bounds[k + 1])) {
      throw std::invalid_argument("interval bounds must increase");
    }
  }
  bool connected = false;
  for (const auto& image : images) {
    if (image.size() != cluster_sizes.size()) {
      throw std::invalid_argument("image graph does not cover every cluster");
    }
    for (const auto& targets : image) {
      for (auto j : targets) {
        if (j >= cluster_sizes.size()) {
          throw std::invalid_argument("image graph names an unknown cluster");
        }
      }
      connected = connected || !targets.empty();
    }
  }
  if (!connected) {
    throw std::invalid_argument("no interval has a connected cluster");
  }
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
    throw std::invalid_argument("noise fraction must lie in [0, 1]");
  }
  if (num_edges == 0) throw std::invalid_argument("num_edges must be positive");
}

SyntheticGraph generate_patterned(const PatternSpec& spec) {
  spec.validate();
  const std::size_t vertices = spec.vertex_count();

  GroundTruth truth;
  std::vector<std::uint32_t> first_vertex;
  for (std::uint32_t c = 0; c < spec.cluster_sizes.size(); ++c) {
    first_vertex.push_back(static_cast<std::uint32_t>(truth.vertex_cluster.size()));
    truth.vertex_cluster.insert(truth.vertex_cluster.end(), spec.cluster_sizes[c], c);
  }

  // Target vertex pools per (interval, source cluster).
  std::vector<std::vector<std::vector<VertexIndex>>> pools(spec.interval_count());
  for (std::size_t k = 0; k < spec.interval_count(); ++k) {
    for (const auto& targets : spec.images[k]) {
      auto& pool = pools[k].emplace_back();
      for (auto j : targets) {
        for (std::uint32_t v = 0; v < spec.cluster_sizes[j]; ++v) {
          pool.push_back(first_vertex[j] + v);
        }
      }
    }
  }

  const double lo = spec.bounds.front();
  const double hi = spec.bounds.back();
  Rng rng(spec.seed, kPatternStream);
  std::vector<TemporalGraph::Edge> edges;
  edges.reserve(spec.num_edges);
  while (edges.size() < spec.num_edges) {
    const auto source = static_cast<VertexIndex>(rng.below(vertices));
    const double t = rng.uniform(lo, hi);
    const auto k = static_cast<std::uint32_t>(
        std::upper_bound(spec.bounds.begin() + 1, spec.bounds.end() - 1, t) -
        (spec.bounds.begin() + 1));
    const auto& pool = pools[k][truth.vertex_cluster[source]];
    if (pool.empty()) continue;
    edges.push_back({source, pool[rng.below(pool.size())], t});
    truth.edge_interval.push_back(k);
  }

  truth.edge_rewired.assign(edges.size(), false);
  const auto noisy = static_cast<std::uint64_t>(
      std::floor(spec.noise_fraction * static_cast<double>(spec.num_edges)));
  Rng noise(spec.seed, kNoiseStream);
  std::vector<std::uint32_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0u);
  for (std::uint64_t i = 0; i < noisy; ++i) {
    std::swap(order[i], order[i + noise.below(order.size() - i)]);
    edges[order[i]].target = static_cast<VertexIndex>(noise.below(vertices));
    truth.edge_rewired[order[i]] = true;
  }

  auto names = vertex_names(vertices);
  return {build_graph_indexed(names, names, std::move(edges)), std::move(truth)};
}

TemporalGraph shuffle_timestamps(const TemporalGraph& graph, std::uint64_t seed) {
  std::vector<TemporalGraph::Edge> edges(graph.edges().begin(), graph.edges().end());
  std::vector<double> stamps;
  stamps.reserve(edges.size());
  for (const auto& e : edges) stamps.push_back(e.timestamp);
  Rng rng(seed, kShuffleStream);
  rng.shuffle(stamps.begin(), stamps.end());
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].timestamp = stamps[i];
  const auto& s = graph.summary();
  return build_graph_indexed(s.source_names, s.target_names, std::move(edges));
}

TemporalGraph rewire_all(const TemporalGraph& graph, std::uint64_t seed) {
  std::vector<TemporalGraph::Edge> edges(graph.edges().begin(), graph.edges().end());
  Rng rng(seed, kRewireStream);
  for (auto& e : edges) {
    e.source = static_cast<VertexIndex>(rng.below(graph.num_sources()));
    e.target = static_cast<VertexIndex>(rng.below(graph.num_targets()));
  }
  const auto& s = graph.summary();
  return build_graph_indexed(s.source_names, s.target_names, std::move(edges));
}

void write_ground_truth(std::ostream& out, const SyntheticGraph& data) {
  const auto& g = data.graph;
  out << "# vertex\tcluster\n";
  for (std::size_t v = 0; v < data.truth.vertex_cluster.size(); ++v) {
    out << g.source_name(static_cast<VertexIndex>(v)) << '\t'
        << data.truth.vertex_cluster[v] << '\n';
  }
  out << "# source\ttarget\ttimestamp\tinterval\trewired\n";
  char ts[40];
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::snprintf(ts, sizeof ts, "%.17g", edges[i].timestamp);
    out << g.source_name(edges[i].source) << '\t' << g.target_name(edges[i].target)
        << '\t' << ts << '\t' << data.truth.edge_interval[i] << '\t'
        << (data.truth.edge_rewired[i] ? 1 : 0) << '\n';
  }
}

}  // namespace tricluster

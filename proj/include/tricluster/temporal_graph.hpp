#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tricluster {

using VertexIndex = std::uint32_t;

struct TemporalEdge {
  std::string source;
  std::string target;
  double timestamp = 0.0;
};

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vertex-level facts a model needs once the edge list itself is gone:
// names and degrees of both sides, and |E|.
struct GraphSummary {
  std::vector<std::string> source_names;
  std::vector<std::string> target_names;
  std::vector<std::uint32_t> out_degrees;
  std::vector<std::uint32_t> in_degrees;
  std::uint64_t edge_count = 0;
};

// Immutable timestamped directed multigraph. Edges keep their input order;
// ranks order them by (timestamp, source, target, input position), 0-based.
class TemporalGraph {
 public:
  struct Edge {
    VertexIndex source = 0;
    VertexIndex target = 0;
    double timestamp = 0.0;
  };

  TemporalGraph();

  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_sources() const { return summary_->source_names.size(); }
  std::size_t num_targets() const { return summary_->target_names.size(); }
  bool empty() const { return edges_.empty(); }

  std::span<const Edge> edges() const { return edges_; }
  // rank of each input edge
  std::span<const std::uint32_t> edge_ranks() const { return rank_of_edge_; }
  // input index of the edge holding each rank
  std::span<const std::uint32_t> edges_by_rank() const { return edge_at_rank_; }
  const Edge& edge_at_rank(std::uint32_t rank) const {
    return edges_[edge_at_rank_[rank]];
  }
  // First rank of every maximal run of equal timestamps, ascending; the
  // only places a time segment may begin.
  std::span<const std::uint32_t> tie_run_starts() const { return tie_runs_; }

  const GraphSummary& summary() const { return *summary_; }
  std::shared_ptr<const GraphSummary> shared_summary() const { return summary_; }

  const std::string& source_name(VertexIndex v) const {
    return summary_->source_names[v];
  }
  const std::string& target_name(VertexIndex v) const {
    return summary_->target_names[v];
  }

  friend TemporalGraph build_graph_indexed(std::vector<std::string>,
                                           std::vector<std::string>,
                                           std::vector<Edge>);

 private:
  std::shared_ptr<const GraphSummary> summary_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> rank_of_edge_;
  std::vector<std::uint32_t> edge_at_rank_;
  std::vector<std::uint32_t> tie_runs_;
};

// Interns vertex names. With declared sets, vertex order follows the
// declaration and unknown endpoints are rejected; otherwise vertices are
// numbered by first appearance.
TemporalGraph build_graph(
    std::span<const TemporalEdge> edges,
    std::optional<std::vector<std::string>> source_set = std::nullopt,
    std::optional<std::vector<std::string>> target_set = std::nullopt);

TemporalGraph build_graph_indexed(std::vector<std::string> source_names,
                                  std::vector<std::string> target_names,
                                  std::vector<TemporalGraph::Edge> edges);

// Tab-separated `source target timestamp`, '#' comments and blank lines
// skipped. With `undirected`, every line yields both directions.
std::vector<TemporalEdge> read_edge_list(std::istream& in,
                                         bool undirected = false);
TemporalGraph load_edge_list(const std::filesystem::path& path,
                             bool undirected = false);
void write_edge_list(std::ostream& out, const TemporalGraph& graph);

}  // namespace tricluster

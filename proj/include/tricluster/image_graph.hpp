#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tricluster/temporal_graph.hpp"

namespace tricluster {

using ClusterIndex = std::uint32_t;
using SegmentIndex = std::uint32_t;

// Vertex -> cluster map of one side. Clusters are numbered 0..K-1 and none
// is empty.
struct Partition {
  std::vector<ClusterIndex> assignment;
  ClusterIndex cluster_count = 0;

  static Partition singletons(std::size_t vertices);
  static Partition single_cluster(std::size_t vertices);
  // Relabels arbitrary labels densely, by order of first appearance.
  static Partition from_labels(std::span<const std::uint32_t> labels);

  std::size_t vertex_count() const { return assignment.size(); }
  std::vector<std::vector<VertexIndex>> members() const;
  void validate() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Contiguous rank intervals covering 0..|E|-1. Each segment starts on a
// tie-run boundary of the graph, so equal timestamps are never split.
struct TimeSegmentation {
  std::vector<std::uint32_t> starts;  // starts[0] == 0, strictly increasing
  std::uint32_t edge_count = 0;
  std::vector<double> time_lo;  // smallest timestamp inside each segment
  std::vector<double> time_hi;  // largest timestamp inside each segment

  std::size_t count() const { return starts.size(); }
  std::uint32_t begin(SegmentIndex n) const { return starts[n]; }
  std::uint32_t end(SegmentIndex n) const {
    return n + 1 < starts.size() ? starts[n + 1] : edge_count;
  }
  std::uint32_t size(SegmentIndex n) const { return end(n) - begin(n); }
  void validate() const;

  friend bool operator==(const TimeSegmentation&,
                         const TimeSegmentation&) = default;
};

// One nonzero tricluster count |e(c_i, c_j, I_n)|.
struct Cell {
  ClusterIndex source = 0;
  ClusterIndex target = 0;
  SegmentIndex segment = 0;
  std::uint32_t count = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

enum class MergeKind : std::uint8_t { source = 0, target = 1, segment = 2 };
enum class Side : std::uint8_t { source = 0, target = 1 };

const char* to_string(MergeKind kind);

// Merge of clusters a < b of one side, or of segments a and b = a + 1.
// `delta` is the exact change of the criterion, in nats.
struct MergeProposal {
  MergeKind kind = MergeKind::source;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double delta = 0.0;
};

// A candidate solution: two vertex partitions, a time segmentation and the
// sparse tricluster count tensor, with cached marginals. Cells are kept
// sorted by (source, target, segment).
class ImageGraphModel {
 public:
  ImageGraphModel(std::shared_ptr<const GraphSummary> graph, Partition sources,
                  Partition targets, TimeSegmentation segments,
                  std::vector<Cell> cells);

  const GraphSummary& graph() const { return *graph_; }
  std::shared_ptr<const GraphSummary> shared_graph() const { return graph_; }

  const Partition& source_partition() const { return sources_; }
  const Partition& target_partition() const { return targets_; }
  const TimeSegmentation& segmentation() const { return segments_; }
  std::span<const Cell> cells() const { return cells_; }

  ClusterIndex source_clusters() const { return sources_.cluster_count; }
  ClusterIndex target_clusters() const { return targets_.cluster_count; }
  SegmentIndex segments() const {
    return static_cast<SegmentIndex>(segments_.count());
  }
  std::uint64_t edge_count() const { return graph_->edge_count; }

  // d_out(c_i), d_in(c_j)
  std::span<const std::uint64_t> source_degrees() const { return source_degree_; }
  std::span<const std::uint64_t> target_degrees() const { return target_degree_; }
  // |c_i|, |c_j| in vertices
  std::span<const std::uint32_t> source_sizes() const { return source_size_; }
  std::span<const std::uint32_t> target_sizes() const { return target_size_; }

  // Running total maintained by merges; absent until a caller seeds it.
  std::optional<double> cached_cost() const { return cached_cost_; }
  void set_cached_cost(std::optional<double> c) { cached_cost_ = c; }

  // Throws std::logic_error on any broken invariant.
  void validate() const;

 private:
  std::shared_ptr<const GraphSummary> graph_;
  Partition sources_;
  Partition targets_;
  TimeSegmentation segments_;
  std::vector<Cell> cells_;
  std::vector<std::uint64_t> source_degree_;
  std::vector<std::uint64_t> target_degree_;
  std::vector<std::uint32_t> source_size_;
  std::vector<std::uint32_t> target_size_;
  std::optional<double> cached_cost_;
};

// Aggregates the graph's edges under the given partitions and segment starts.
// Segment starts must be tie-run starts of the graph.
ImageGraphModel model_from_graph(const TemporalGraph& graph, Partition sources,
                                 Partition targets,
                                 std::vector<std::uint32_t> segment_starts);

// One cluster per vertex and one segment per distinct timestamp.
ImageGraphModel finest_model(const TemporalGraph& graph);
// One source cluster, one target cluster, one segment.
ImageGraphModel null_model(const TemporalGraph& graph);
// The null model of the graph a model was built on.
ImageGraphModel null_model(const ImageGraphModel& model);

ImageGraphModel apply_merge(const ImageGraphModel& model,
                            const MergeProposal& proposal);

// Applies several merges of one kind at once. Pairs index the input model
// and must be pairwise disjoint; `total_delta` is added to the cached cost.
ImageGraphModel apply_merges(
    const ImageGraphModel& model, MergeKind kind,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs,
    double total_delta);

}  // namespace tricluster

#pragma once

// Exact description length c(IG) = -log P(IG) - log P(G | IG) of an image
// graph, itemised per term, and exact merge deltas computed from the touched
// cells only.

#include <cstdint>
#include <span>
#include <vector>

#include "tricluster/image_graph.hpp"

namespace tricluster {

struct CriterionBreakdown {
  double prior_counts = 0.0;      // choice of K_S, K_T, N
  double prior_partitions = 0.0;  // vertex partitions given K_S, K_T
  double prior_cells = 0.0;       // edge counts over the K_S*K_T*N cells
  double prior_degrees = 0.0;     // vertex degrees inside each cluster
  double lik_cells = 0.0;         // edges drawn into cells
  double lik_degrees = 0.0;       // cluster edges spread over vertices
  double lik_time = 0.0;          // edge ranks inside each segment
  double total = 0.0;
  // True when a vertex side is too large for the exact Stirling recurrence.
  bool stirling_approximate = false;

  double prior() const {
    return prior_counts + prior_partitions + prior_cells + prior_degrees;
  }
  double likelihood() const { return lik_cells + lik_degrees + lik_time; }
};

CriterionBreakdown cost(const ImageGraphModel& model);

// log C(E + K - 1, K - 1) for K cells.
double prior_cells_term(std::uint64_t edges, std::uint64_t cells);
// prior_cells_term(E, after) - prior_cells_term(E, before)
double prior_cells_change(std::uint64_t edges, std::uint64_t before,
                          std::uint64_t after);

MergeProposal delta_cost_merge_clusters(const ImageGraphModel& model, Side side,
                                        ClusterIndex a, ClusterIndex b);
// Merges segments n and n + 1.
MergeProposal delta_cost_merge_segments(const ImageGraphModel& model,
                                        SegmentIndex n);

// A merge whose delta splits into a part shared by every merge of its kind
// (it depends only on K_S, K_T, N) and a local part that only depends on the
// two operands. Disjoint merges of one kind leave each other's local part
// untouched.
struct MergeCandidate {
  MergeProposal proposal;
  double local = 0.0;
};

// Indexes a model's cells by each axis so that every candidate merge can be
// scored by a sorted join of the two operands' cells.
class MergeEvaluator {
 public:
  explicit MergeEvaluator(const ImageGraphModel& model);

  double common_delta(MergeKind kind, std::uint64_t source_clusters,
                      std::uint64_t target_clusters,
                      std::uint64_t segments) const;

  MergeCandidate evaluate(MergeKind kind, std::uint32_t a,
                          std::uint32_t b) const;

  // Every cluster pair of both sides and every adjacent segment pair.
  std::vector<MergeCandidate> enumerate() const;
  std::vector<MergeCandidate> enumerate(MergeKind kind) const;

 private:
  struct AxisIndex {
    std::vector<std::uint64_t> keys;  // the two other coordinates, packed
    std::vector<std::uint32_t> counts;
    std::vector<std::uint32_t> offsets;
  };

  double shared_gain(const AxisIndex& axis, std::uint32_t a,
                     std::uint32_t b) const;
  double local_delta(MergeKind kind, std::uint32_t a, std::uint32_t b) const;
  void check_operands(MergeKind kind, std::uint32_t a, std::uint32_t b) const;

  const ImageGraphModel& model_;
  std::span<const double> table_;
  AxisIndex by_source_;
  AxisIndex by_target_;
  AxisIndex by_segment_;
};

}  // namespace tricluster

#pragma once

// Agglomerative post-processing of a fitted model: least-cost merges down to
// the null model, tracked by informativity tau = (c - c_null) / (c* - c_null).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tricluster/image_graph.hpp"

namespace tricluster {

// Raised when the origin and the null model cost the same, so tau has no
// meaning and coarsening is vacuous.
class NoStructureError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CoarseningStep {
  MergeProposal merge;  // operands index the model before this step
  double total_cost = 0.0;
  double tau = 0.0;
};

struct CoarseningTrace {
  std::vector<CoarseningStep> steps;
  double origin_cost = 0.0;
  double null_cost = 0.0;
};

double informativity(double cost, double origin_cost, double null_cost);
double informativity(const ImageGraphModel& model, double origin_cost,
                     double null_cost);

// Applies the least-delta merge (ties: merge kind, then smaller operand) one
// at a time and stops at the last model whose tau is still >= target_tau.
// The trace lists the applied steps. target_tau must lie in (0, 1].
std::pair<ImageGraphModel, CoarseningTrace> coarsen_to_informativity(
    const ImageGraphModel& model, double target_tau);

// The same sequence of merges, run all the way to the null model.
CoarseningTrace coarsen_fully(const ImageGraphModel& model);

// alpha1 KL(p1 || m) + alpha2 KL(p2 || m) with m = alpha1 p1 + alpha2 p2.
// Both inputs must be distributions over the same support (sums within
// 1e-9 of 1) and the weights non-negative with unit sum.
double js_divergence(std::span<const double> p1, std::span<const double> p2,
                     double alpha1, double alpha2);

// Exact merge cost next to its asymptotic reading (m1 + m2) JS(P1, P2),
// where P_i spreads the operand's edges over its cells along the other axes.
struct MergeDivergence {
  MergeProposal exact;
  double js = 0.0;           // weights from edge mass
  double edge_mass = 0.0;    // m1 + m2 in edges
  double vertex_count = 0.0; // |c1| + |c2| in vertices (edges for segments)
  double js_vertex = 0.0;    // weights from vertex counts
  double approx_edge_mass = 0.0;
  double approx_vertex_count = 0.0;
  // |exact - approx_edge_mass| / |exact|
  double relative_gap = 0.0;
};

MergeDivergence merge_divergence(const ImageGraphModel& model, MergeKind kind,
                                 std::uint32_t a, std::uint32_t b);

}  // namespace tricluster

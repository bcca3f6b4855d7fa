#pragma once

#include <cstdint>
#include <vector>

#include "tricluster/image_graph.hpp"
#include "tricluster/rng.hpp"
#include "tricluster/temporal_graph.hpp"

namespace tricluster {

struct OptimizerConfig {
  std::uint32_t vns_restarts = 10;
  // Largest perturbation size. Sizes run 1, 2, 4, ... capped here; 0 turns
  // the search off and the result is greedy_merge of the start model.
  std::uint32_t vns_max_neighborhood = 3;
  std::uint64_t seed = 1;
  // Above this many vertices on a side, the start model pre-merges that
  // side's vertices at random into ceil(sqrt(|E|)) clusters.
  std::uint64_t pre_aggregation_threshold = 10000;
  // Worker threads for restarts; 0 picks the hardware concurrency.
  std::uint32_t threads = 1;

  // Throws std::invalid_argument.
  void validate() const;
};

struct GreedyTrace {
  std::vector<double> pass_costs;  // cost before the first pass, then after each
  std::vector<MergeKind> pass_kinds;
  std::vector<std::uint32_t> pass_merges;
};

// Best-improvement descent: each pass scores every source-pair, target-pair
// and adjacent-segment merge exactly, takes the kind of the best one, and
// applies that kind's improving merges in increasing delta order while they
// stay disjoint and improving. Stops when no merge lowers the cost by more
// than rounding noise (1e-12 of the cost).
// The returned model carries its exact cost in cached_cost().
ImageGraphModel greedy_merge(const ImageGraphModel& start,
                             GreedyTrace* trace = nullptr);

// Splits `size` random non-atomic clusters or segments back to singletons
// (clusters) or single tie runs (segments). When fewer than `size` such
// entities exist the finest model is returned.
ImageGraphModel perturb(const TemporalGraph& graph, const ImageGraphModel& model,
                        std::uint32_t size, Rng& rng);

// Moves single vertices between clusters and shifts segment boundaries
// between tie runs, each move taken only when it lowers the exact cost, for
// at most `max_rounds` sweeps. Complements the merges, which can never undo
// an early grouping.
ImageGraphModel improve_locally(const TemporalGraph& graph,
                                const ImageGraphModel& model,
                                std::uint32_t max_rounds = 8);

// Alternates greedy_merge and improve_locally until neither helps.
ImageGraphModel descend(const TemporalGraph& graph, const ImageGraphModel& start);

// Random initial solution: the start model's vertex partitions, or with even
// odds a random regrouping of unaggregated sides, with the time
// axis cut at a random number (at most ceil(sqrt(|E|))) of random tie runs.
ImageGraphModel random_start(const TemporalGraph& graph,
                             const OptimizerConfig& config, Rng& rng);

// Finest model, or the pre-aggregated start for very large vertex sets.
ImageGraphModel start_model(const TemporalGraph& graph,
                            const OptimizerConfig& config);

struct VnsTrace {
  double descent_cost = 0.0;  // descent from the start model
  // Best-so-far cost after every perturb/descend cycle, per restart.
  std::vector<std::vector<double>> restart_costs;
  std::uint32_t winning_restart = 0;
};

// Variable neighborhood search around descend(). Restart 0 starts from the
// start model, the others from random_start(); each then perturbs its best
// solution with growing neighborhood sizes, going back to size 1 after every
// improvement. Restarts are independent and may run concurrently; the winner is the lowest cost, ties
// broken by restart index, so the result never depends on the thread count.
// The null model also competes, as the coarsest possible solution.
ImageGraphModel vns_optimize(const TemporalGraph& graph,
                             const OptimizerConfig& config,
                             VnsTrace* trace = nullptr);

}  // namespace tricluster

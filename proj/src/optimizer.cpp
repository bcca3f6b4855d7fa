#include "tricluster/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "tricluster/criterion.hpp"

namespace tricluster {

namespace {

bool candidate_less(const MergeCandidate& x, const MergeCandidate& y) {
  const auto& p = x.proposal;
  const auto& q = y.proposal;
  return std::tie(p.delta, p.kind, p.a, p.b) < std::tie(q.delta, q.kind, q.a, q.b);
}

double exact_cost(const ImageGraphModel& model) { return cost(model).total; }

// Sizes 1, 2, 4, ... with the last one capped at `limit`.
std::vector<std::uint32_t> neighborhood_sizes(std::uint32_t limit) {
  std::vector<std::uint32_t> sizes;
  for (std::uint64_t k = 1; limit > 0; k *= 2) {
    sizes.push_back(static_cast<std::uint32_t>(std::min<std::uint64_t>(k, limit)));
    if (k >= limit) break;
  }
  return sizes;
}

double noise_floor(double cost) { return 1e-12 * std::max(1.0, std::fabs(cost)); }

bool improves(double candidate, double incumbent) {
  return candidate < incumbent - noise_floor(incumbent);
}

Partition random_aggregation(std::size_t vertices, std::uint64_t clusters,
                             Rng& rng) {
  std::vector<std::uint32_t> order(vertices);
  for (std::uint32_t v = 0; v < vertices; ++v) order[v] = v;
  rng.shuffle(order.begin(), order.end());
  std::vector<std::uint32_t> labels(vertices);
  for (std::size_t i = 0; i < vertices; ++i) {
    labels[order[i]] = static_cast<std::uint32_t>(i % clusters);
  }
  return Partition::from_labels(labels);
}

}  // namespace

void OptimizerConfig::validate() const {
  if (vns_restarts < 1) {
    throw std::invalid_argument("vns_restarts must be at least 1");
  }
}

ImageGraphModel greedy_merge(const ImageGraphModel& start, GreedyTrace* trace) {
  ImageGraphModel model = start;
  model.set_cached_cost(exact_cost(model));
  if (trace) trace->pass_costs.push_back(*model.cached_cost());

  for (;;) {
    std::vector<MergeCandidate> candidates;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> batch;
    double batch_delta = 0.0;
    MergeKind kind{};
    {
      const MergeEvaluator evaluator(model);
      candidates = evaluator.enumerate();
      if (candidates.empty()) break;
      std::sort(candidates.begin(), candidates.end(), candidate_less);
      // Deltas within rounding of zero do not count as improvements.
      const double floor = -noise_floor(*model.cached_cost());
      if (!(candidates.front().proposal.delta < floor)) break;

      kind = candidates.front().proposal.kind;
      std::uint64_t ks = model.source_clusters();
      std::uint64_t kt = model.target_clusters();
      std::uint64_t ns = model.segments();
      const std::uint64_t extent =
          kind == MergeKind::source ? ks : kind == MergeKind::target ? kt : ns;
      std::vector<bool> used(extent, false);
      for (const auto& c : candidates) {
        const auto& p = c.proposal;
        if (p.delta >= floor) break;
        if (p.kind != kind || used[p.a] || used[p.b]) continue;
        // Earlier merges of the batch only move the shared part of the delta.
        const double delta = c.local + evaluator.common_delta(kind, ks, kt, ns);
        if (!(delta < floor)) continue;
        used[p.a] = used[p.b] = true;
        batch.emplace_back(p.a, p.b);
        batch_delta += delta;
        switch (kind) {
          case MergeKind::source: --ks; break;
          case MergeKind::target: --kt; break;
          case MergeKind::segment: --ns; break;
        }
      }
    }
    model = apply_merges(model, kind, batch, batch_delta);
    if (trace) {
      trace->pass_costs.push_back(*model.cached_cost());
      trace->pass_kinds.push_back(kind);
      trace->pass_merges.push_back(static_cast<std::uint32_t>(batch.size()));
    }
  }
  // Replace the running sum by a fresh evaluation so costs compare exactly.
  model.set_cached_cost(exact_cost(model));
  return model;
}

ImageGraphModel perturb(const TemporalGraph& graph, const ImageGraphModel& model,
                        std::uint32_t size, Rng& rng) {
  if (size < 1) throw std::invalid_argument("neighborhood size must be >= 1");

  struct Entity {
    MergeKind kind;
    std::uint32_t id;
  };
  const auto runs = graph.tie_run_starts();
  const auto& seg = model.segmentation();
  auto runs_in = [&](SegmentIndex n) {
    const auto lo = std::lower_bound(runs.begin(), runs.end(), seg.begin(n));
    const auto hi = std::lower_bound(runs.begin(), runs.end(), seg.end(n));
    return std::pair{lo, hi};
  };

  std::vector<Entity> pool;
  for (ClusterIndex i = 0; i < model.source_clusters(); ++i) {
    if (model.source_sizes()[i] > 1) pool.push_back({MergeKind::source, i});
  }
  for (ClusterIndex j = 0; j < model.target_clusters(); ++j) {
    if (model.target_sizes()[j] > 1) pool.push_back({MergeKind::target, j});
  }
  for (SegmentIndex n = 0; n < model.segments(); ++n) {
    const auto [lo, hi] = runs_in(n);
    if (hi - lo > 1) pool.push_back({MergeKind::segment, n});
  }
  if (pool.size() <= size) return finest_model(graph);

  for (std::uint32_t i = 0; i < size; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  std::vector<bool> explode_source(model.source_clusters(), false);
  std::vector<bool> explode_target(model.target_clusters(), false);
  std::vector<std::uint32_t> starts(seg.starts);
  for (std::uint32_t i = 0; i < size; ++i) {
    switch (pool[i].kind) {
      case MergeKind::source: explode_source[pool[i].id] = true; break;
      case MergeKind::target: explode_target[pool[i].id] = true; break;
      case MergeKind::segment: {
        const auto [lo, hi] = runs_in(pool[i].id);
        starts.insert(starts.end(), lo + 1, hi);
        break;
      }
    }
  }
  std::sort(starts.begin(), starts.end());

  auto split = [](const Partition& p, const std::vector<bool>& explode) {
    std::vector<std::uint32_t> labels(p.vertex_count());
    for (std::size_t v = 0; v < labels.size(); ++v) {
      const auto c = p.assignment[v];
      labels[v] = explode[c] ? p.cluster_count + static_cast<std::uint32_t>(v) : c;
    }
    return Partition::from_labels(labels);
  };
  return model_from_graph(graph, split(model.source_partition(), explode_source),
                          split(model.target_partition(), explode_target),
                          std::move(starts));
}

ImageGraphModel start_model(const TemporalGraph& graph,
                            const OptimizerConfig& config) {
  if (graph.num_sources() <= config.pre_aggregation_threshold &&
      graph.num_targets() <= config.pre_aggregation_threshold) {
    return finest_model(graph);
  }
  const auto clusters = static_cast<std::uint64_t>(
      std::ceil(std::sqrt(static_cast<double>(graph.num_edges()))));
  Rng rng(config.seed, 0);
  auto side = [&](std::size_t vertices) {
    return vertices > config.pre_aggregation_threshold && vertices > clusters
               ? random_aggregation(vertices, clusters, rng)
               : Partition::singletons(vertices);
  };
  Partition sources = side(graph.num_sources());
  Partition targets = side(graph.num_targets());
  const auto runs = graph.tie_run_starts();
  return model_from_graph(graph, std::move(sources), std::move(targets),
                          std::vector<std::uint32_t>(runs.begin(), runs.end()));
}

ImageGraphModel descend(const TemporalGraph& graph, const ImageGraphModel& start) {
  ImageGraphModel best = greedy_merge(start);
  for (;;) {
    ImageGraphModel moved = improve_locally(graph, best);
    if (!improves(*moved.cached_cost(), *best.cached_cost())) break;
    best = greedy_merge(moved);
  }
  return best;
}

ImageGraphModel random_start(const TemporalGraph& graph,
                             const OptimizerConfig& config, Rng& rng) {
  const ImageGraphModel base = start_model(graph, config);
  // Half of the starts also group the vertices at a random granularity; the
  // rest keep the start model's partitions.
  const bool regroup = rng.below(2) == 1;
  auto side = [&](const Partition& given) {
    const std::size_t vertices = given.vertex_count();
    if (!regroup || given.cluster_count != vertices) return given;
    const std::uint64_t clusters = 1 + rng.below(vertices);
    std::vector<std::uint32_t> labels(vertices);
    for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(clusters));
    return Partition::from_labels(labels);
  };
  Partition sources = side(base.source_partition());
  Partition targets = side(base.target_partition());
  const auto runs = graph.tie_run_starts();
  const auto limit = std::min<std::uint64_t>(
      runs.size(),
      static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(graph.num_edges())))));
  const auto segments = 1 + rng.below(limit);
  std::vector<std::uint32_t> cuts(runs.begin() + 1, runs.end());
  for (std::uint64_t i = 0; i + 1 < segments; ++i) {
    std::swap(cuts[i], cuts[i + rng.below(cuts.size() - i)]);
  }
  cuts.resize(segments - 1);
  cuts.push_back(0);
  std::sort(cuts.begin(), cuts.end());
  return model_from_graph(graph, std::move(sources), std::move(targets),
                          std::move(cuts));
}

ImageGraphModel vns_optimize(const TemporalGraph& graph,
                             const OptimizerConfig& config, VnsTrace* trace) {
  config.validate();
  if (graph.empty()) throw std::invalid_argument("cannot fit an empty graph");

  const auto sizes = neighborhood_sizes(config.vns_max_neighborhood);
  // Without perturbation the search degenerates to the plain greedy descent.
  const bool explore = !sizes.empty();
  const ImageGraphModel start = start_model(graph, config);
  const ImageGraphModel base = explore ? descend(graph, start) : greedy_merge(start);
  // descend() is deterministic, so a perturbation landing on the start model
  // reuses the base descent.
  auto descend_from = [&](const ImageGraphModel& from) {
    if (from.source_partition() == start.source_partition() &&
        from.target_partition() == start.target_partition() &&
        from.segmentation() == start.segmentation()) {
      return base;
    }
    return descend(graph, from);
  };
  const std::uint32_t restarts = config.vns_restarts;

  std::vector<std::optional<ImageGraphModel>> results(restarts);
  std::vector<std::vector<double>> histories(restarts);

  // Restart 0 continues from the descent of the start model, the others
  // from random initial solutions; all then explore by perturbation.
  auto run_restart = [&](std::uint32_t r) {
    Rng rng(config.seed, r + 1);
    ImageGraphModel best = base;
    if (r > 0 && explore) {
      ImageGraphModel fresh = descend(graph, random_start(graph, config, rng));
      if (improves(*fresh.cached_cost(), *best.cached_cost())) best = std::move(fresh);
    }
    histories[r].push_back(*best.cached_cost());
    std::size_t k = 0;
    while (k < sizes.size()) {
      ImageGraphModel candidate = descend_from(perturb(graph, best, sizes[k], rng));
      if (improves(*candidate.cached_cost(), *best.cached_cost())) {
        best = std::move(candidate);
        k = 0;
      } else {
        ++k;
      }
      histories[r].push_back(*best.cached_cost());
    }
    results[r] = std::move(best);
  };
  std::uint32_t workers = config.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, restarts);
  if (workers <= 1) {
    for (std::uint32_t r = 0; r < restarts; ++r) run_restart(r);
  } else {
    std::atomic<std::uint32_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::uint32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint32_t r; (r = next.fetch_add(1)) < restarts;) {
          try {
            run_restart(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::uint32_t winner = 0;
  for (std::uint32_t r = 1; r < restarts; ++r) {
    if (*results[r]->cached_cost() < *results[winner]->cached_cost()) winner = r;
  }
  ImageGraphModel best = std::move(*results[winner]);

  if (explore) {
    ImageGraphModel coarsest = null_model(graph);
    coarsest.set_cached_cost(exact_cost(coarsest));
    if (improves(*coarsest.cached_cost(), *best.cached_cost())) best = std::move(coarsest);
  }

  if (trace) {
    trace->descent_cost = *base.cached_cost();
    trace->restart_costs = std::move(histories);
    trace->winning_restart = winner;
  }
  return best;
}

}  // namespace tricluster

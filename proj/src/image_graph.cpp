#include "tricluster/image_graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace tricluster {

namespace {

bool cell_less(const Cell& x, const Cell& y) {
  if (x.source != y.source) return x.source < y.source;
  if (x.target != y.target) return x.target < y.target;
  return x.segment < y.segment;
}

bool same_coordinates(const Cell& x, const Cell& y) {
  return x.source == y.source && x.target == y.target && x.segment == y.segment;
}

// Sorts, sums duplicates and drops empty cells.
void normalize(std::vector<Cell>& cells) {
  std::sort(cells.begin(), cells.end(), cell_less);
  std::size_t out = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (out > 0 && same_coordinates(cells[out - 1], cells[i])) {
      cells[out - 1].count += cells[i].count;
    } else {
      cells[out++] = cells[i];
    }
  }
  cells.resize(out);
  std::erase_if(cells, [](const Cell& c) { return c.count == 0; });
}

void require_edges(std::uint64_t edges) {
  if (edges == 0) {
    throw std::invalid_argument("cannot build a model of an empty graph");
  }
}

// Dense relabelling after merging disjoint pairs: every absorbed id maps to
// its survivor, and surviving ids close the gaps.
std::vector<std::uint32_t> merge_map(
    std::uint32_t count,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::vector<std::uint32_t> survivor(count);
  std::iota(survivor.begin(), survivor.end(), 0u);
  std::vector<bool> touched(count, false);
  for (auto [a, b] : pairs) {
    if (a == b) throw std::invalid_argument("cannot merge an entity with itself");
    if (a >= count || b >= count) {
      throw std::invalid_argument("merge operand out of range");
    }
    if (a > b) std::swap(a, b);
    if (touched[a] || touched[b]) {
      throw std::invalid_argument("batched merges must be pairwise disjoint");
    }
    touched[a] = touched[b] = true;
    survivor[b] = a;
  }
  std::vector<std::uint32_t> dense(count);
  std::uint32_t next = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (survivor[i] == i) dense[i] = next++;
  }
  for (std::uint32_t i = 0; i < count; ++i) dense[i] = dense[survivor[i]];
  return dense;
}

Partition relabel(const Partition& p, const std::vector<std::uint32_t>& map,
                  std::uint32_t new_count) {
  Partition out;
  out.cluster_count = new_count;
  out.assignment.resize(p.assignment.size());
  for (std::size_t v = 0; v < p.assignment.size(); ++v) {
    out.assignment[v] = map[p.assignment[v]];
  }
  return out;
}

}  // namespace

const char* to_string(MergeKind kind) {
  switch (kind) {
    case MergeKind::source:
      return "source";
    case MergeKind::target:
      return "target";
    case MergeKind::segment:
      return "segment";
  }
  return "?";
}

Partition Partition::singletons(std::size_t vertices) {
  Partition p;
  p.assignment.resize(vertices);
  std::iota(p.assignment.begin(), p.assignment.end(), 0u);
  p.cluster_count = static_cast<ClusterIndex>(vertices);
  return p;
}

Partition Partition::single_cluster(std::size_t vertices) {
  Partition p;
  p.assignment.assign(vertices, 0);
  p.cluster_count = vertices > 0 ? 1 : 0;
  return p;
}

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
  Partition p;
  std::unordered_map<std::uint32_t, ClusterIndex> dense;
  p.assignment.reserve(labels.size());
  for (const auto label : labels) {
    auto [it, inserted] = dense.try_emplace(label, p.cluster_count);
    if (inserted) ++p.cluster_count;
    p.assignment.push_back(it->second);
  }
  return p;
}

std::vector<std::vector<VertexIndex>> Partition::members() const {
  std::vector<std::vector<VertexIndex>> out(cluster_count);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    out[assignment[v]].push_back(static_cast<VertexIndex>(v));
  }
  return out;
}

void Partition::validate() const {
  if (assignment.empty()) {
    if (cluster_count != 0) throw std::logic_error("partition of no vertices has clusters");
    return;
  }
  if (cluster_count < 1 || cluster_count > assignment.size()) {
    throw std::logic_error("partition cluster count out of range");
  }
  std::vector<bool> used(cluster_count, false);
  for (const auto c : assignment) {
    if (c >= cluster_count) throw std::logic_error("cluster index out of range");
    used[c] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw std::logic_error("partition has an empty cluster");
  }
}

void TimeSegmentation::validate() const {
  if (starts.empty() || starts.front() != 0) {
    throw std::logic_error("segmentation must start at rank 0");
  }
  for (std::size_t n = 1; n < starts.size(); ++n) {
    if (starts[n] <= starts[n - 1]) {
      throw std::logic_error("segment bounds must be strictly increasing");
    }
  }
  if (starts.back() >= edge_count) {
    throw std::logic_error("last segment is empty");
  }
  if (time_lo.size() != starts.size() || time_hi.size() != starts.size()) {
    throw std::logic_error("segment timestamp bounds missing");
  }
  for (std::size_t n = 0; n < starts.size(); ++n) {
    if (time_lo[n] > time_hi[n] || (n > 0 && time_lo[n] <= time_hi[n - 1])) {
      throw std::logic_error("segment timestamp bounds out of order");
    }
  }
}

ImageGraphModel::ImageGraphModel(std::shared_ptr<const GraphSummary> graph,
                                 Partition sources, Partition targets,
                                 TimeSegmentation segments,
                                 std::vector<Cell> cells)
    : graph_(std::move(graph)),
      sources_(std::move(sources)),
      targets_(std::move(targets)),
      segments_(std::move(segments)),
      cells_(std::move(cells)) {
  if (!graph_) throw std::invalid_argument("model needs a graph summary");
  require_edges(graph_->edge_count);
  if (sources_.vertex_count() != graph_->source_names.size() ||
      targets_.vertex_count() != graph_->target_names.size()) {
    throw std::invalid_argument("partition size does not match the graph");
  }
  normalize(cells_);

  source_size_.assign(sources_.cluster_count, 0);
  target_size_.assign(targets_.cluster_count, 0);
  for (const auto c : sources_.assignment) {
    if (c >= sources_.cluster_count) throw std::invalid_argument("source cluster index out of range");
    ++source_size_[c];
  }
  for (const auto c : targets_.assignment) {
    if (c >= targets_.cluster_count) throw std::invalid_argument("target cluster index out of range");
    ++target_size_[c];
  }
  source_degree_.assign(sources_.cluster_count, 0);
  target_degree_.assign(targets_.cluster_count, 0);
  const auto segment_count = segments_.count();
  for (const auto& c : cells_) {
    if (c.source >= sources_.cluster_count || c.target >= targets_.cluster_count ||
        c.segment >= segment_count) {
      throw std::invalid_argument("cell coordinates out of range");
    }
    source_degree_[c.source] += c.count;
    target_degree_[c.target] += c.count;
  }
}

void ImageGraphModel::validate() const {
  sources_.validate();
  targets_.validate();
  segments_.validate();
  const auto& g = *graph_;
  if (segments_.edge_count != g.edge_count) {
    throw std::logic_error("segmentation does not cover the edge ranks");
  }
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_segment(segments_.count(), 0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto& c = cells_[i];
    if (c.count == 0) throw std::logic_error("stored cell with zero count");
    if (i > 0 && !cell_less(cells_[i - 1], c)) {
      throw std::logic_error("cells not strictly sorted");
    }
    total += c.count;
    per_segment[c.segment] += c.count;
  }
  if (total != g.edge_count) {
    throw std::logic_error("cell counts do not sum to |E|");
  }
  for (SegmentIndex n = 0; n < segments_.count(); ++n) {
    if (per_segment[n] != segments_.size(n)) {
      throw std::logic_error("segment " + std::to_string(n) +
                             " size disagrees with its cells");
    }
  }
  std::vector<std::uint64_t> out(sources_.cluster_count, 0);
  std::vector<std::uint64_t> in(targets_.cluster_count, 0);
  for (std::size_t v = 0; v < g.out_degrees.size(); ++v) {
    out[sources_.assignment[v]] += g.out_degrees[v];
  }
  for (std::size_t v = 0; v < g.in_degrees.size(); ++v) {
    in[targets_.assignment[v]] += g.in_degrees[v];
  }
  if (!std::equal(out.begin(), out.end(), source_degree_.begin()) ||
      !std::equal(in.begin(), in.end(), target_degree_.begin())) {
    throw std::logic_error("cluster degrees disagree with vertex degrees");
  }
}

ImageGraphModel model_from_graph(const TemporalGraph& graph, Partition sources,
                                 Partition targets,
                                 std::vector<std::uint32_t> segment_starts) {
  require_edges(graph.num_edges());
  const auto ties = graph.tie_run_starts();
  for (const auto s : segment_starts) {
    if (!std::binary_search(ties.begin(), ties.end(), s)) {
      throw std::invalid_argument("segment boundary at rank " +
                                  std::to_string(s) +
                                  " splits a run of equal timestamps");
    }
  }
  TimeSegmentation seg;
  seg.starts = std::move(segment_starts);
  seg.edge_count = static_cast<std::uint32_t>(graph.num_edges());
  for (SegmentIndex n = 0; n < seg.count(); ++n) {
    seg.time_lo.push_back(graph.edge_at_rank(seg.begin(n)).timestamp);
    seg.time_hi.push_back(graph.edge_at_rank(seg.end(n) - 1).timestamp);
  }
  seg.validate();

  std::vector<Cell> cells;
  cells.reserve(graph.num_edges());
  SegmentIndex n = 0;
  for (std::uint32_t r = 0; r < seg.edge_count; ++r) {
    while (r >= seg.end(n)) ++n;
    const auto& e = graph.edge_at_rank(r);
    cells.push_back({sources.assignment.at(e.source),
                     targets.assignment.at(e.target), n, 1});
  }
  return ImageGraphModel(graph.shared_summary(), std::move(sources),
                         std::move(targets), std::move(seg), std::move(cells));
}

ImageGraphModel finest_model(const TemporalGraph& graph) {
  const auto ties = graph.tie_run_starts();
  return model_from_graph(graph, Partition::singletons(graph.num_sources()),
                          Partition::singletons(graph.num_targets()),
                          std::vector<std::uint32_t>(ties.begin(), ties.end()));
}

ImageGraphModel null_model(const TemporalGraph& graph) {
  return model_from_graph(graph, Partition::single_cluster(graph.num_sources()),
                          Partition::single_cluster(graph.num_targets()), {0});
}

ImageGraphModel null_model(const ImageGraphModel& model) {
  const auto& seg = model.segmentation();
  TimeSegmentation one;
  one.starts = {0};
  one.edge_count = seg.edge_count;
  one.time_lo = {seg.time_lo.front()};
  one.time_hi = {seg.time_hi.back()};
  const auto edges = static_cast<std::uint32_t>(model.edge_count());
  return ImageGraphModel(
      model.shared_graph(),
      Partition::single_cluster(model.source_partition().vertex_count()),
      Partition::single_cluster(model.target_partition().vertex_count()),
      std::move(one), {Cell{0, 0, 0, edges}});
}

ImageGraphModel apply_merge(const ImageGraphModel& model,
                            const MergeProposal& proposal) {
  if (proposal.a == proposal.b) {
    throw std::invalid_argument("cannot merge a cluster or segment with itself");
  }
  if (proposal.kind == MergeKind::segment) {
    const auto lo = std::min(proposal.a, proposal.b);
    const auto hi = std::max(proposal.a, proposal.b);
    if (hi != lo + 1) {
      throw std::invalid_argument("only adjacent segments can be merged");
    }
  }
  const std::pair<std::uint32_t, std::uint32_t> pair{proposal.a, proposal.b};
  return apply_merges(model, proposal.kind, {&pair, 1}, proposal.delta);
}

ImageGraphModel apply_merges(
    const ImageGraphModel& model, MergeKind kind,
    std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs,
    double total_delta) {
  Partition sources = model.source_partition();
  Partition targets = model.target_partition();
  TimeSegmentation seg = model.segmentation();
  std::vector<Cell> cells(model.cells().begin(), model.cells().end());

  switch (kind) {
    case MergeKind::source: {
      const auto map = merge_map(sources.cluster_count, pairs);
      const auto count = sources.cluster_count - static_cast<std::uint32_t>(pairs.size());
      sources = relabel(sources, map, count);
      for (auto& c : cells) c.source = map[c.source];
      break;
    }
    case MergeKind::target: {
      const auto map = merge_map(targets.cluster_count, pairs);
      const auto count = targets.cluster_count - static_cast<std::uint32_t>(pairs.size());
      targets = relabel(targets, map, count);
      for (auto& c : cells) c.target = map[c.target];
      break;
    }
    case MergeKind::segment: {
      const auto count = static_cast<std::uint32_t>(seg.count());
      for (auto [a, b] : pairs) {
        if (std::max(a, b) != std::min(a, b) + 1) {
          throw std::invalid_argument("only adjacent segments can be merged");
        }
      }
      const auto map = merge_map(count, pairs);
      TimeSegmentation merged;
      merged.edge_count = seg.edge_count;
      for (std::uint32_t n = 0; n < count; ++n) {
        if (n == 0 || map[n] != map[n - 1]) {
          merged.starts.push_back(seg.starts[n]);
          merged.time_lo.push_back(seg.time_lo[n]);
          merged.time_hi.push_back(seg.time_hi[n]);
        } else {
          merged.time_hi.back() = seg.time_hi[n];
        }
      }
      seg = std::move(merged);
      for (auto& c : cells) c.segment = map[c.segment];
      break;
    }
  }

  ImageGraphModel out(model.shared_graph(), std::move(sources),
                      std::move(targets), std::move(seg), std::move(cells));
  if (model.cached_cost()) out.set_cached_cost(*model.cached_cost() + total_delta);
  return out;
}

}  // namespace tricluster

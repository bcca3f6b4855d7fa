#include <algorithm>
#include <cmath>
#include <span>
#include <tuple>
#include <unordered_map>

#include "tricluster/combinatorics.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/optimizer.hpp"
#include "tricluster/rng.hpp"

namespace tricluster {

namespace {

constexpr double kMinGain = 1e-9;
// Below this many cells (or 8 |E|) the counts live in a flat array.
constexpr std::uint64_t kDenseFloor = std::uint64_t{1} << 20;

struct CellKey {
  std::uint32_t source;
  std::uint32_t target;
  std::uint32_t segment;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    return mix64(k.source ^ mix64(k.target ^ mix64(k.segment)));
  }
};

double degree_prior(std::uint64_t degree, std::uint64_t vertices) {
  if (vertices <= 1) return 0.0;
  return log_binomial(static_cast<std::int64_t>(degree + vertices - 1),
                      static_cast<std::int64_t>(vertices - 1));
}

// Mutable copy of a model's counts, for single-vertex and single-boundary
// moves whose exact deltas only touch a handful of cells.
class WorkingGrid {
 public:
  WorkingGrid(const TemporalGraph& graph, const ImageGraphModel& model)
      : graph_(graph),
        table_(CombinatoricsTable::shared().reserve(graph.num_edges() + 1)),
        starts_(model.segmentation().starts) {
    sides_[0].assignment = model.source_partition().assignment;
    sides_[1].assignment = model.target_partition().assignment;
    sides_[0].clusters = model.source_clusters();
    sides_[1].clusters = model.target_clusters();
    sides_[0].degree.assign(model.source_degrees().begin(), model.source_degrees().end());
    sides_[1].degree.assign(model.target_degrees().begin(), model.target_degrees().end());
    sides_[0].size.assign(model.source_sizes().begin(), model.source_sizes().end());
    sides_[1].size.assign(model.target_sizes().begin(), model.target_sizes().end());
    sides_[0].live = sides_[0].clusters;
    sides_[1].live = sides_[1].clusters;
    const std::uint64_t space = static_cast<std::uint64_t>(model.source_clusters()) *
                                model.target_clusters() * model.segments();
    if (space <= std::max<std::uint64_t>(kDenseFloor, 8 * graph.num_edges())) {
      dense_.assign(space, 0);
    } else {
      sparse_.reserve(model.cells().size() * 2);
    }
    for (const auto& c : model.cells()) add({c.source, c.target, c.segment}, c.count);
    segment_size_.resize(starts_.size());
    for (SegmentIndex n = 0; n < starts_.size(); ++n) {
      segment_size_[n] = model.segmentation().size(n);
    }
  }

  // One pass over the vertices of a side; returns the summed gain.
  double move_vertices(int side) {
    build_profiles(side);
    auto& s = sides_[side];
    const auto& vertex_degrees =
        side == 0 ? graph_.summary().out_degrees : graph_.summary().in_degrees;
    double gained = 0.0;
    for (VertexIndex v = 0; v < s.assignment.size() && s.live > 1; ++v) {
      const auto a = s.assignment[v];
      const std::uint64_t dv = vertex_degrees[v];
      const auto profile = profile_of(v);
      const double leave = leave_delta(side, a, dv, profile);
      double best = -kMinGain;
      std::uint32_t best_b = a;
      for (std::uint32_t b = 0; b < s.clusters; ++b) {
        if (b == a || s.size[b] == 0) continue;
        const double delta = leave + join_delta(side, a, b, dv, profile);
        if (delta < best) {
          best = delta;
          best_b = b;
        }
      }
      if (best_b == a) continue;
      apply_move(side, v, a, best_b, dv, profile);
      gained -= best;
    }
    return gained;
  }

  // Moves each boundary between consecutive segments to its best tie-run
  // position inside the two segments.
  double move_boundaries() {
    const auto runs = graph_.tie_run_starts();
    double gained = 0.0;
    for (SegmentIndex n = 0; n + 1 < starts_.size(); ++n) {
      const std::uint32_t lo = starts_[n];
      const std::uint32_t hi = end(n + 1);
      const std::uint32_t current = starts_[n + 1];
      std::uint32_t best_pos = current;
      double best = -kMinGain;

      // Right: edges of segment n+1 join segment n one by one.
      double acc = 0.0;
      auto it = std::upper_bound(runs.begin(), runs.end(), current);
      for (std::uint32_t r = current; it != runs.end() && *it < hi; ++it) {
        for (; r < *it; ++r) acc += shift(n, r, true);
        if (acc < best) {
          best = acc;
          best_pos = *it;
        }
      }
      roll_back(n, current, starts_[n + 1]);

      // Left: edges of segment n join segment n+1 one by one.
      acc = 0.0;
      auto jt = std::lower_bound(runs.begin(), runs.end(), current);
      for (std::uint32_t r = current; jt != runs.begin() && *(jt - 1) > lo;) {
        --jt;
        for (; r > *jt; --r) acc += shift(n, r - 1, false);
        if (acc < best) {
          best = acc;
          best_pos = *jt;
        }
      }
      roll_back(n, current, starts_[n + 1]);

      if (best_pos != current) {
        if (best_pos > current) {
          for (std::uint32_t r = current; r < best_pos; ++r) shift(n, r, true);
        } else {
          for (std::uint32_t r = current; r > best_pos; --r) shift(n, r - 1, false);
        }
        gained -= best;
      }
    }
    return gained;
  }

  ImageGraphModel to_model() const {
    return model_from_graph(graph_, Partition::from_labels(sides_[0].assignment),
                            Partition::from_labels(sides_[1].assignment), starts_);
  }

 private:
  struct SideState {
    std::vector<ClusterIndex> assignment;
    std::uint32_t clusters = 0;  // label range, including emptied clusters
    std::uint32_t live = 0;      // nonempty clusters
    std::vector<std::uint64_t> degree;
    std::vector<std::uint32_t> size;
  };

  // (other-side cluster, segment, count) of one vertex's edges.
  struct ProfileEntry {
    std::uint32_t other;
    std::uint32_t segment;
    std::uint32_t count;
  };

  std::uint32_t end(SegmentIndex n) const {
    return n + 1 < starts_.size() ? starts_[n + 1]
                                  : static_cast<std::uint32_t>(graph_.num_edges());
  }

  // Cluster labels never grow during the moves, so the dense layout keeps
  // the input's K_S x K_T x N shape.
  std::size_t dense_index(const CellKey& k) const {
    return (static_cast<std::size_t>(k.source) * sides_[1].clusters + k.target) *
               starts_.size() +
           k.segment;
  }

  std::uint32_t count(const CellKey& k) const {
    if (!dense_.empty()) return dense_[dense_index(k)];
    const auto it = sparse_.find(k);
    return it == sparse_.end() ? 0 : it->second;
  }

  void add(const CellKey& k, std::int64_t x) {
    if (!dense_.empty()) {
      auto& c = dense_[dense_index(k)];
      c = static_cast<std::uint32_t>(static_cast<std::int64_t>(c) + x);
      return;
    }
    auto& c = sparse_[k];
    c = static_cast<std::uint32_t>(static_cast<std::int64_t>(c) + x);
    if (c == 0) sparse_.erase(k);
  }

  CellKey key(int side, std::uint32_t cluster, const ProfileEntry& e) const {
    return side == 0 ? CellKey{cluster, e.other, e.segment}
                     : CellKey{e.other, cluster, e.segment};
  }

  void build_profiles(int side) {
    std::vector<SegmentIndex> segment_of(graph_.num_edges());
    for (SegmentIndex n = 0; n < starts_.size(); ++n) {
      std::fill(segment_of.begin() + starts_[n], segment_of.begin() + end(n), n);
    }
    struct Row {
      VertexIndex vertex;
      std::uint32_t other;
      std::uint32_t segment;
    };
    std::vector<Row> rows;
    rows.reserve(graph_.num_edges());
    const auto ranks = graph_.edge_ranks();
    const auto edges = graph_.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      const auto n = segment_of[ranks[i]];
      if (side == 0) {
        rows.push_back({e.source, sides_[1].assignment[e.target], n});
      } else {
        rows.push_back({e.target, sides_[0].assignment[e.source], n});
      }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
      return std::tie(x.vertex, x.other, x.segment) < std::tie(y.vertex, y.other, y.segment);
    });
    const auto vertices = sides_[side].assignment.size();
    profile_offsets_.assign(vertices + 1, 0);
    profiles_.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].vertex == rows[i - 1].vertex &&
          rows[i].other == rows[i - 1].other && rows[i].segment == rows[i - 1].segment) {
        ++profiles_.back().count;
        continue;
      }
      profiles_.push_back({rows[i].other, rows[i].segment, 1});
      ++profile_offsets_[rows[i].vertex + 1];
    }
    for (std::size_t v = 0; v < vertices; ++v) {
      profile_offsets_[v + 1] += profile_offsets_[v];
    }
  }

  std::span<const ProfileEntry> profile_of(VertexIndex v) const {
    return std::span<const ProfileEntry>(profiles_).subspan(
        profile_offsets_[v], profile_offsets_[v + 1] - profile_offsets_[v]);
  }

  std::uint64_t cell_space(std::uint64_t ks, std::uint64_t kt) const {
    return ks * kt * starts_.size();
  }

  // Change from taking vertex v out of cluster a, including the vanishing
  // of a when v is its last member.
  double leave_delta(int side, std::uint32_t a, std::uint64_t dv,
                     std::span<const ProfileEntry> profile) const {
    const auto& s = sides_[side];
    const std::uint64_t da = s.degree[a];
    double delta = degree_prior(da - dv, s.size[a] - 1) - degree_prior(da, s.size[a]) +
                   table_[da - dv] - table_[da];
    for (const auto& e : profile) {
      const auto x = count(key(side, a, e));
      delta += table_[x] - table_[x - e.count];
    }
    if (s.size[a] == 1) {
      auto& tables = CombinatoricsTable::shared();
      const std::uint64_t vertices = s.assignment.size();
      const std::uint64_t other = sides_[1 - side].live;
      delta += tables.log_cumulative_stirling(vertices, s.live - 1) -
               tables.log_cumulative_stirling(vertices, s.live) +
               prior_cells_change(graph_.num_edges(), cell_space(s.live, other),
                                  cell_space(s.live - 1, other));
    }
    return delta;
  }

  double join_delta(int side, std::uint32_t a, std::uint32_t b, std::uint64_t dv,
                    std::span<const ProfileEntry> profile) const {
    (void)a;
    const auto& s = sides_[side];
    const std::uint64_t db = s.degree[b];
    double delta = degree_prior(db + dv, s.size[b] + 1) - degree_prior(db, s.size[b]) +
                   table_[db + dv] - table_[db];
    for (const auto& e : profile) {
      const auto y = count(key(side, b, e));
      delta += table_[y] - table_[y + e.count];
    }
    return delta;
  }

  void apply_move(int side, VertexIndex v, std::uint32_t a, std::uint32_t b,
                  std::uint64_t dv, std::span<const ProfileEntry> profile) {
    auto& s = sides_[side];
    for (const auto& e : profile) {
      add(key(side, a, e), -static_cast<std::int64_t>(e.count));
      add(key(side, b, e), e.count);
    }
    s.degree[a] -= dv;
    s.degree[b] += dv;
    --s.size[a];
    ++s.size[b];
    if (s.size[a] == 0) --s.live;
    s.assignment[v] = b;
  }

  // Moves the edge at `rank` across the boundary between n and n+1 and
  // returns the change of the criterion. Forward: from n+1 into n.
  double shift(SegmentIndex n, std::uint32_t rank, bool forward) {
    const auto& e = graph_.edge_at_rank(rank);
    const auto s = sides_[0].assignment[e.source];
    const auto t = sides_[1].assignment[e.target];
    const SegmentIndex from = forward ? n + 1 : n;
    const SegmentIndex to = forward ? n : n + 1;
    const CellKey kf{s, t, from};
    const CellKey kt{s, t, to};
    const auto x = count(kf);
    const auto y = count(kt);
    const double delta = std::log(static_cast<double>(x)) -
                         std::log(static_cast<double>(y + 1)) +
                         std::log(static_cast<double>(segment_size_[to] + 1)) -
                         std::log(static_cast<double>(segment_size_[from]));
    add(kf, -1);
    add(kt, 1);
    --segment_size_[from];
    ++segment_size_[to];
    starts_[n + 1] = forward ? rank + 1 : rank;
    return delta;
  }

  void roll_back(SegmentIndex n, std::uint32_t target, std::uint32_t at) {
    for (std::uint32_t r = at; r > target; --r) shift(n, r - 1, false);
    for (std::uint32_t r = at; r < target; ++r) shift(n, r, true);
  }

  const TemporalGraph& graph_;
  std::span<const double> table_;
  std::vector<std::uint32_t> starts_;
  std::vector<std::uint32_t> segment_size_;
  SideState sides_[2];
  std::vector<std::uint32_t> dense_;
  std::unordered_map<CellKey, std::uint32_t, CellKeyHash> sparse_;
  std::vector<ProfileEntry> profiles_;
  std::vector<std::uint32_t> profile_offsets_;
};

}  // namespace

ImageGraphModel improve_locally(const TemporalGraph& graph,
                                const ImageGraphModel& model,
                                std::uint32_t max_rounds) {
  WorkingGrid grid(graph, model);
  for (std::uint32_t round = 0; round < max_rounds; ++round) {
    double gained = 0.0;
    if (model.segments() > 1) gained += grid.move_boundaries();
    gained += grid.move_vertices(0);
    gained += grid.move_vertices(1);
    if (gained <= kMinGain) break;
  }
  ImageGraphModel out = grid.to_model();
  out.set_cached_cost(cost(out).total);
  return out;
}

}  // namespace tricluster

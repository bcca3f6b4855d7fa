#include "tricluster/temporal_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string_view>
#include <unordered_map>

namespace tricluster {

namespace {

class Interner {
 public:
  VertexIndex intern(const std::string& name) {
    auto [it, inserted] =
        index_.try_emplace(name, static_cast<VertexIndex>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  std::optional<VertexIndex> find(const std::string& name) const {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    return std::nullopt;
  }

  std::vector<std::string> release() { return std::move(names_); }

 private:
  std::unordered_map<std::string, VertexIndex> index_;
  std::vector<std::string> names_;
};

Interner declared(const std::vector<std::string>& names, const char* side) {
  Interner interner;
  for (const auto& name : names) {
    if (interner.find(name)) {
      throw IngestionError(std::string("duplicate ") + side +
                           " vertex in declared set: '" + name + "'");
    }
    interner.intern(name);
  }
  return interner;
}

std::string describe(const TemporalEdge& e, std::size_t index) {
  char ts[32];
  std::snprintf(ts, sizeof ts, "%.17g", e.timestamp);
  return "edge #" + std::to_string(index) + " (" + e.source + " -> " +
         e.target + " @ " + ts + ")";
}

}  // namespace

TemporalGraph::TemporalGraph() : summary_(std::make_shared<GraphSummary>()) {}

TemporalGraph build_graph_indexed(std::vector<std::string> source_names,
                                  std::vector<std::string> target_names,
                                  std::vector<TemporalGraph::Edge> edges) {
  if (edges.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw IngestionError("too many edges");
  }
  auto summary = std::make_shared<GraphSummary>();
  summary->out_degrees.assign(source_names.size(), 0);
  summary->in_degrees.assign(target_names.size(), 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (e.source >= source_names.size() || e.target >= target_names.size()) {
      throw IngestionError("edge #" + std::to_string(i) +
                           " references an undeclared vertex");
    }
    if (!std::isfinite(e.timestamp)) {
      throw IngestionError("edge #" + std::to_string(i) +
                           " has a non-finite timestamp");
    }
    ++summary->out_degrees[e.source];
    ++summary->in_degrees[e.target];
  }
  summary->source_names = std::move(source_names);
  summary->target_names = std::move(target_names);
  summary->edge_count = edges.size();

  TemporalGraph graph;
  const auto n = static_cast<std::uint32_t>(edges.size());
  graph.edge_at_rank_.resize(n);
  std::iota(graph.edge_at_rank_.begin(), graph.edge_at_rank_.end(), 0u);
  std::sort(graph.edge_at_rank_.begin(), graph.edge_at_rank_.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              const auto& ea = edges[a];
              const auto& eb = edges[b];
              if (ea.timestamp != eb.timestamp) return ea.timestamp < eb.timestamp;
              if (ea.source != eb.source) return ea.source < eb.source;
              if (ea.target != eb.target) return ea.target < eb.target;
              return a < b;
            });
  graph.rank_of_edge_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) {
    graph.rank_of_edge_[graph.edge_at_rank_[r]] = r;
  }
  for (std::uint32_t r = 0; r < n; ++r) {
    if (r == 0 || edges[graph.edge_at_rank_[r]].timestamp !=
                      edges[graph.edge_at_rank_[r - 1]].timestamp) {
      graph.tie_runs_.push_back(r);
    }
  }
  graph.edges_ = std::move(edges);
  graph.summary_ = std::move(summary);
  return graph;
}

TemporalGraph build_graph(std::span<const TemporalEdge> edges,
                          std::optional<std::vector<std::string>> source_set,
                          std::optional<std::vector<std::string>> target_set) {
  const bool closed_sources = source_set.has_value();
  const bool closed_targets = target_set.has_value();
  Interner sources = closed_sources ? declared(*source_set, "source") : Interner{};
  Interner targets = closed_targets ? declared(*target_set, "target") : Interner{};

  std::vector<TemporalGraph::Edge> indexed;
  indexed.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (!std::isfinite(e.timestamp)) {
      throw IngestionError(describe(e, i) + ": non-finite timestamp");
    }
    TemporalGraph::Edge out;
    out.timestamp = e.timestamp;
    if (closed_sources) {
      auto v = sources.find(e.source);
      if (!v) {
        throw IngestionError(describe(e, i) + ": source '" + e.source +
                             "' is not in the declared source set");
      }
      out.source = *v;
    } else {
      out.source = sources.intern(e.source);
    }
    if (closed_targets) {
      auto v = targets.find(e.target);
      if (!v) {
        throw IngestionError(describe(e, i) + ": target '" + e.target +
                             "' is not in the declared target set");
      }
      out.target = *v;
    } else {
      out.target = targets.intern(e.target);
    }
    indexed.push_back(out);
  }
  return build_graph_indexed(sources.release(), targets.release(),
                             std::move(indexed));
}

std::vector<TemporalEdge> read_edge_list(std::istream& in, bool undirected) {
  std::vector<TemporalEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto first_tab = line.find('\t');
    const auto second_tab =
        first_tab == std::string::npos ? first_tab : line.find('\t', first_tab + 1);
    if (second_tab == std::string::npos ||
        line.find('\t', second_tab + 1) != std::string::npos) {
      throw IngestionError("line " + std::to_string(line_no) +
                           ": expected source<TAB>target<TAB>timestamp");
    }
    TemporalEdge e;
    e.source = line.substr(0, first_tab);
    e.target = line.substr(first_tab + 1, second_tab - first_tab - 1);
    if (e.source.empty() || e.target.empty()) {
      throw IngestionError("line " + std::to_string(line_no) +
                           ": empty vertex identifier");
    }
    std::string_view ts = std::string_view{line}.substr(second_tab + 1);
    while (!ts.empty() && (ts.back() == ' ')) ts.remove_suffix(1);
    while (!ts.empty() && (ts.front() == ' ')) ts.remove_prefix(1);
    if (!ts.empty() && ts.front() == '+') ts.remove_prefix(1);
    const auto [ptr, ec] =
        std::from_chars(ts.data(), ts.data() + ts.size(), e.timestamp);
    if (ts.empty() || ec != std::errc{} || ptr != ts.data() + ts.size()) {
      throw IngestionError("line " + std::to_string(line_no) +
                           ": cannot parse timestamp '" + std::string(ts) + "'");
    }
    if (!std::isfinite(e.timestamp)) {
      throw IngestionError("line " + std::to_string(line_no) +
                           ": non-finite timestamp");
    }
    TemporalEdge reversed{e.target, e.source, e.timestamp};
    edges.push_back(std::move(e));
    if (undirected) edges.push_back(std::move(reversed));
  }
  if (in.bad()) throw IngestionError("read error");
  return edges;
}

TemporalGraph load_edge_list(const std::filesystem::path& path,
                             bool undirected) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open edge file " + path.string());
  const auto edges = read_edge_list(in, undirected);
  return build_graph(edges);
}

void write_edge_list(std::ostream& out, const TemporalGraph& graph) {
  char ts[40];
  for (const auto& e : graph.edges()) {
    std::snprintf(ts, sizeof ts, "%.17g", e.timestamp);
    out << graph.source_name(e.source) << '\t' << graph.target_name(e.target)
        << '\t' << ts << '\n';
  }
}

}  // namespace tricluster

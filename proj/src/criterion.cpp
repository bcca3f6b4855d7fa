#include "tricluster/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tricluster/combinatorics.hpp"
#include "tricluster/kernels.hpp"

namespace tricluster {

namespace {

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

std::uint64_t cell_space(std::uint64_t ks, std::uint64_t kt, std::uint64_t n) {
  const unsigned __int128 k = static_cast<unsigned __int128>(ks) * kt * n;
  if (k > (std::uint64_t{1} << 62)) {
    throw std::overflow_error("tricluster space K_S*K_T*N is too large");
  }
  return static_cast<std::uint64_t>(k);
}

// log C(d + n - 1, n - 1): ways to spread d edges over n vertices.
double degree_prior(std::uint64_t degree, std::uint64_t vertices) {
  if (vertices <= 1) return 0.0;
  return log_binomial(static_cast<std::int64_t>(degree + vertices - 1),
                      static_cast<std::int64_t>(vertices - 1));
}

// sum_c [log d(c)! - sum_{v in c} log d(v)!], per cluster so that clusters
// holding at most one active vertex contribute exactly zero.
double degree_likelihood(std::span<const std::uint64_t> cluster_degrees,
                         std::span<const ClusterIndex> assignment,
                         std::span<const std::uint32_t> vertex_degrees) {
  const auto k = cluster_degrees.size();
  std::vector<double> vertex_terms(k, 0.0);
  std::vector<std::uint32_t> active(k, 0);
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    if (vertex_degrees[v] == 0) continue;
    vertex_terms[assignment[v]] += log_factorial(vertex_degrees[v]);
    ++active[assignment[v]];
  }
  Neumaier total;
  for (std::size_t c = 0; c < k; ++c) {
    if (active[c] <= 1) continue;
    total.add(std::max(0.0, log_factorial(cluster_degrees[c]) - vertex_terms[c]));
  }
  return total.value();
}

constexpr std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

double prior_cells_term(std::uint64_t edges, std::uint64_t cells) {
  if (cells <= 1) return 0.0;
  // log((E+K-1)! / (K-1)!) - log E!
  return log_factorial_ratio(edges + cells - 1, cells - 1) - log_factorial(edges);
}

double prior_cells_change(std::uint64_t edges, std::uint64_t before,
                          std::uint64_t after) {
  if (before == after) return 0.0;
  if (before == 0 || after == 0) {
    throw std::domain_error("prior_cells_change: empty tricluster space");
  }
  return log_factorial_ratio(edges + after - 1, edges + before - 1) -
         log_factorial_ratio(after - 1, before - 1);
}

CriterionBreakdown cost(const ImageGraphModel& model) {
  model.validate();
  const auto& g = model.graph();
  const std::uint64_t vs = g.source_names.size();
  const std::uint64_t vt = g.target_names.size();
  const std::uint64_t edges = g.edge_count;
  const std::uint64_t ks = model.source_clusters();
  const std::uint64_t kt = model.target_clusters();
  const std::uint64_t segments = model.segments();

  auto& tables = CombinatoricsTable::shared();
  const auto table = tables.reserve(edges);

  CriterionBreakdown out;
  out.prior_counts = std::log(static_cast<double>(vs)) +
                     std::log(static_cast<double>(vt)) +
                     std::log(static_cast<double>(edges));
  out.prior_partitions = tables.log_cumulative_stirling(vs, ks) +
                         tables.log_cumulative_stirling(vt, kt);
  out.stirling_approximate = !stirling_is_exact(vs) || !stirling_is_exact(vt);
  out.prior_cells = prior_cells_term(edges, cell_space(ks, kt, segments));

  Neumaier degrees;
  for (std::uint64_t i = 0; i < ks; ++i) {
    degrees.add(degree_prior(model.source_degrees()[i], model.source_sizes()[i]));
  }
  for (std::uint64_t j = 0; j < kt; ++j) {
    degrees.add(degree_prior(model.target_degrees()[j], model.target_sizes()[j]));
  }
  out.prior_degrees = degrees.value();

  std::vector<std::uint32_t> counts;
  counts.reserve(model.cells().size());
  for (const auto& c : model.cells()) counts.push_back(c.count);
  if (counts.size() == 1) {
    out.lik_cells = 0.0;
  } else {
    out.lik_cells = log_factorial(edges) - kernels::sum_log_factorial(counts, table);
  }

  out.lik_degrees =
      degree_likelihood(model.source_degrees(), model.source_partition().assignment,
                        g.out_degrees) +
      degree_likelihood(model.target_degrees(), model.target_partition().assignment,
                        g.in_degrees);

  counts.clear();
  for (SegmentIndex n = 0; n < segments; ++n) {
    counts.push_back(model.segmentation().size(n));
  }
  out.lik_time = kernels::sum_log_factorial(counts, table);

  Neumaier total;
  for (double term : {out.prior_counts, out.prior_partitions, out.prior_cells,
                      out.prior_degrees, out.lik_cells, out.lik_degrees,
                      out.lik_time}) {
    total.add(term);
  }
  out.total = total.value();
  return out;
}

MergeEvaluator::MergeEvaluator(const ImageGraphModel& model)
    : model_(model),
      table_(CombinatoricsTable::shared().reserve(model.edge_count())) {
  const auto cells = model.cells();
  const auto n = cells.size();

  auto build = [&](AxisIndex& axis, std::uint32_t axis_size, auto axis_of,
                   auto key_of) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
      const auto ax = axis_of(cells[x]);
      const auto ay = axis_of(cells[y]);
      if (ax != ay) return ax < ay;
      return key_of(cells[x]) < key_of(cells[y]);
    });
    axis.keys.resize(n);
    axis.counts.resize(n);
    axis.offsets.assign(axis_size + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& c = cells[order[i]];
      axis.keys[i] = key_of(c);
      axis.counts[i] = c.count;
      ++axis.offsets[axis_of(c) + 1];
    }
    std::partial_sum(axis.offsets.begin(), axis.offsets.end(), axis.offsets.begin());
  };

  build(by_source_, model.source_clusters(),
        [](const Cell& c) { return c.source; },
        [](const Cell& c) { return pack(c.target, c.segment); });
  build(by_target_, model.target_clusters(),
        [](const Cell& c) { return c.target; },
        [](const Cell& c) { return pack(c.source, c.segment); });
  build(by_segment_, model.segments(),
        [](const Cell& c) { return c.segment; },
        [](const Cell& c) { return pack(c.source, c.target); });
}

double MergeEvaluator::shared_gain(const AxisIndex& axis, std::uint32_t a,
                                   std::uint32_t b) const {
  thread_local std::vector<std::uint32_t> left;
  thread_local std::vector<std::uint32_t> right;
  left.clear();
  right.clear();
  std::uint32_t i = axis.offsets[a];
  const std::uint32_t i_end = axis.offsets[a + 1];
  std::uint32_t j = axis.offsets[b];
  const std::uint32_t j_end = axis.offsets[b + 1];
  while (i < i_end && j < j_end) {
    const auto ki = axis.keys[i];
    const auto kj = axis.keys[j];
    if (ki < kj) {
      ++i;
    } else if (kj < ki) {
      ++j;
    } else {
      left.push_back(axis.counts[i++]);
      right.push_back(axis.counts[j++]);
    }
  }
  if (left.empty()) return 0.0;
  return kernels::sum_merge_gain(left, right, table_);
}

double MergeEvaluator::local_delta(MergeKind kind, std::uint32_t a,
                                   std::uint32_t b) const {
  if (kind == MergeKind::segment) {
    const auto& seg = model_.segmentation();
    const std::uint64_t sa = seg.size(a);
    const std::uint64_t sb = seg.size(b);
    const double time = table_[sa + sb] - table_[sa] - table_[sb];
    return time - shared_gain(by_segment_, a, b);
  }

  const bool source = kind == MergeKind::source;
  const auto degrees = source ? model_.source_degrees() : model_.target_degrees();
  const auto sizes = source ? model_.source_sizes() : model_.target_sizes();
  const std::uint64_t da = degrees[a];
  const std::uint64_t db = degrees[b];
  const std::uint64_t na = sizes[a];
  const std::uint64_t nb = sizes[b];
  const double prior = degree_prior(da + db, na + nb) - degree_prior(da, na) -
                       degree_prior(db, nb);
  const double likelihood = table_[da + db] - table_[da] - table_[db];
  return prior + likelihood - shared_gain(source ? by_source_ : by_target_, a, b);
}

double MergeEvaluator::common_delta(MergeKind kind, std::uint64_t ks,
                                    std::uint64_t kt, std::uint64_t n) const {
  const std::uint64_t edges = model_.edge_count();
  const std::uint64_t before = cell_space(ks, kt, n);
  auto& tables = CombinatoricsTable::shared();
  switch (kind) {
    case MergeKind::source: {
      const std::uint64_t vs = model_.graph().source_names.size();
      return tables.log_cumulative_stirling(vs, ks - 1) -
             tables.log_cumulative_stirling(vs, ks) +
             prior_cells_change(edges, before, cell_space(ks - 1, kt, n));
    }
    case MergeKind::target: {
      const std::uint64_t vt = model_.graph().target_names.size();
      return tables.log_cumulative_stirling(vt, kt - 1) -
             tables.log_cumulative_stirling(vt, kt) +
             prior_cells_change(edges, before, cell_space(ks, kt - 1, n));
    }
    case MergeKind::segment:
      return prior_cells_change(edges, before, cell_space(ks, kt, n - 1));
  }
  return 0.0;
}

void MergeEvaluator::check_operands(MergeKind kind, std::uint32_t a,
                                    std::uint32_t b) const {
  if (a == b) {
    throw std::invalid_argument("cannot merge a cluster or segment with itself");
  }
  std::uint32_t limit = 0;
  switch (kind) {
    case MergeKind::source:
      limit = model_.source_clusters();
      break;
    case MergeKind::target:
      limit = model_.target_clusters();
      break;
    case MergeKind::segment:
      limit = model_.segments();
      if (std::max(a, b) != std::min(a, b) + 1) {
        throw std::invalid_argument("only adjacent segments can be merged");
      }
      break;
  }
  if (a >= limit || b >= limit) {
    throw std::out_of_range(std::string(to_string(kind)) +
                            " merge operand out of range");
  }
}

MergeCandidate MergeEvaluator::evaluate(MergeKind kind, std::uint32_t a,
                                        std::uint32_t b) const {
  check_operands(kind, a, b);
  if (a > b) std::swap(a, b);
  MergeCandidate out;
  out.local = local_delta(kind, a, b);
  out.proposal = {kind, a, b,
                  out.local + common_delta(kind, model_.source_clusters(),
                                           model_.target_clusters(),
                                           model_.segments())};
  return out;
}

std::vector<MergeCandidate> MergeEvaluator::enumerate(MergeKind kind) const {
  std::vector<MergeCandidate> out;
  const std::uint64_t ks = model_.source_clusters();
  const std::uint64_t kt = model_.target_clusters();
  const std::uint64_t ns = model_.segments();
  if (kind == MergeKind::segment) {
    if (ns < 2) return out;
    const double common = common_delta(kind, ks, kt, ns);
    out.reserve(ns - 1);
    for (std::uint32_t n = 0; n + 1 < ns; ++n) {
      const double local = local_delta(kind, n, n + 1);
      out.push_back({{kind, n, n + 1, common + local}, local});
    }
    return out;
  }
  const std::uint64_t k = kind == MergeKind::source ? ks : kt;
  if (k < 2) return out;
  const double common = common_delta(kind, ks, kt, ns);
  out.reserve(k * (k - 1) / 2);
  for (std::uint32_t a = 0; a < k; ++a) {
    for (std::uint32_t b = a + 1; b < k; ++b) {
      const double local = local_delta(kind, a, b);
      out.push_back({{kind, a, b, common + local}, local});
    }
  }
  return out;
}

std::vector<MergeCandidate> MergeEvaluator::enumerate() const {
  auto out = enumerate(MergeKind::source);
  for (auto kind : {MergeKind::target, MergeKind::segment}) {
    auto more = enumerate(kind);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

MergeProposal delta_cost_merge_clusters(const ImageGraphModel& model, Side side,
                                        ClusterIndex a, ClusterIndex b) {
  const auto kind = side == Side::source ? MergeKind::source : MergeKind::target;
  return MergeEvaluator(model).evaluate(kind, a, b).proposal;
}

MergeProposal delta_cost_merge_segments(const ImageGraphModel& model,
                                        SegmentIndex n) {
  if (n + 1 >= model.segments()) {
    throw std::out_of_range("segment merge index " + std::to_string(n) +
                            " out of range for " +
                            std::to_string(model.segments()) + " segments");
  }
  return MergeEvaluator(model).evaluate(MergeKind::segment, n, n + 1).proposal;
}

}  // namespace tricluster

#include "tricluster/simplifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "tricluster/criterion.hpp"

namespace tricluster {

namespace {

constexpr double kDistributionTolerance = 1e-9;

// Least delta first; ties go to the lower kind, then the smaller operand.
MergeProposal least_costly(const ImageGraphModel& model) {
  const auto candidates = MergeEvaluator(model).enumerate();
  const auto it = std::min_element(
      candidates.begin(), candidates.end(),
      [](const MergeCandidate& x, const MergeCandidate& y) {
        const auto& p = x.proposal;
        const auto& q = y.proposal;
        return std::tie(p.delta, p.kind, p.a, p.b) <
               std::tie(q.delta, q.kind, q.a, q.b);
      });
  return it->proposal;
}

bool is_null(const ImageGraphModel& model) {
  return model.source_clusters() == 1 && model.target_clusters() == 1 &&
         model.segments() == 1;
}

double denominator(double origin_cost, double null_cost) {
  const double d = origin_cost - null_cost;
  if (std::fabs(d) <= 1e-12 * std::max(1.0, std::fabs(null_cost))) {
    throw NoStructureError(
        "model costs the same as the null model: informativity is undefined "
        "and coarsening is vacuous");
  }
  return d;
}

void check_distribution(std::span<const double> p, const char* name) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) {
      throw std::invalid_argument(std::string(name) + " has a negative entry");
    }
    total += x;
  }
  if (std::fabs(total - 1.0) > kDistributionTolerance) {
    throw std::invalid_argument(std::string(name) + " does not sum to 1");
  }
}

double kl_term(double p, double m) { return p > 0.0 ? p * std::log(p / m) : 0.0; }

// The two operands' edge counts keyed by the coordinates along the other
// axes, aligned on the union of their supports.
struct AlignedProfiles {
  std::vector<double> first;
  std::vector<double> second;
  double mass_first = 0.0;
  double mass_second = 0.0;
};

AlignedProfiles align(const ImageGraphModel& model, MergeKind kind,
                      std::uint32_t a, std::uint32_t b) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<double, double>> grid;
  for (const auto& c : model.cells()) {
    std::uint32_t axis = 0;
    std::pair<std::uint32_t, std::uint32_t> key;
    switch (kind) {
      case MergeKind::source: axis = c.source; key = {c.target, c.segment}; break;
      case MergeKind::target: axis = c.target; key = {c.source, c.segment}; break;
      case MergeKind::segment: axis = c.segment; key = {c.source, c.target}; break;
    }
    if (axis == a) grid[key].first += c.count;
    if (axis == b) grid[key].second += c.count;
  }
  AlignedProfiles out;
  for (const auto& [key, counts] : grid) {
    out.first.push_back(counts.first);
    out.second.push_back(counts.second);
    out.mass_first += counts.first;
    out.mass_second += counts.second;
  }
  return out;
}

void apply_least(ImageGraphModel& model, CoarseningTrace& trace) {
  const MergeProposal merge = least_costly(model);
  model = apply_merge(model, merge);
  const double total = cost(model).total;
  trace.steps.push_back(
      {merge, total, informativity(total, trace.origin_cost, trace.null_cost)});
}

CoarseningTrace start_trace(const ImageGraphModel& model) {
  CoarseningTrace trace;
  trace.origin_cost = cost(model).total;
  trace.null_cost = cost(null_model(model)).total;
  denominator(trace.origin_cost, trace.null_cost);
  return trace;
}

}  // namespace

double informativity(double cost_value, double origin_cost, double null_cost) {
  return (cost_value - null_cost) / denominator(origin_cost, null_cost);
}

double informativity(const ImageGraphModel& model, double origin_cost,
                     double null_cost) {
  return informativity(cost(model).total, origin_cost, null_cost);
}

std::pair<ImageGraphModel, CoarseningTrace> coarsen_to_informativity(
    const ImageGraphModel& model, double target_tau) {
  if (!(target_tau > 0.0 && target_tau <= 1.0)) {
    throw std::invalid_argument("target informativity must lie in (0, 1]");
  }
  CoarseningTrace trace = start_trace(model);
  ImageGraphModel current = model;
  if (target_tau == 1.0) return {std::move(current), std::move(trace)};

  while (!is_null(current)) {
    const MergeProposal merge = least_costly(current);
    ImageGraphModel next = apply_merge(current, merge);
    const double total = cost(next).total;
    const double tau = informativity(total, trace.origin_cost, trace.null_cost);
    if (tau < target_tau) break;
    trace.steps.push_back({merge, total, tau});
    current = std::move(next);
  }
  return {std::move(current), std::move(trace)};
}

CoarseningTrace coarsen_fully(const ImageGraphModel& model) {
  CoarseningTrace trace = start_trace(model);
  ImageGraphModel current = model;
  while (!is_null(current)) apply_least(current, trace);
  return trace;
}

double js_divergence(std::span<const double> p1, std::span<const double> p2,
                     double alpha1, double alpha2) {
  if (p1.size() != p2.size()) {
    throw std::invalid_argument("distributions have different support sizes");
  }
  if (!(alpha1 >= 0.0 && alpha2 >= 0.0) ||
      std::fabs(alpha1 + alpha2 - 1.0) > kDistributionTolerance) {
    throw std::invalid_argument("weights must be non-negative and sum to 1");
  }
  check_distribution(p1, "first distribution");
  check_distribution(p2, "second distribution");
  double total = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    const double m = alpha1 * p1[i] + alpha2 * p2[i];
    if (m <= 0.0) continue;
    total += alpha1 * kl_term(p1[i], m) + alpha2 * kl_term(p2[i], m);
  }
  return std::max(0.0, total);
}

MergeDivergence merge_divergence(const ImageGraphModel& model, MergeKind kind,
                                 std::uint32_t a, std::uint32_t b) {
  MergeDivergence out;
  out.exact = MergeEvaluator(model).evaluate(kind, a, b).proposal;

  auto profiles = align(model, kind, a, b);
  if (profiles.mass_first <= 0.0 || profiles.mass_second <= 0.0) {
    throw std::invalid_argument("merge operand carries no edges");
  }
  for (auto& x : profiles.first) x /= profiles.mass_first;
  for (auto& x : profiles.second) x /= profiles.mass_second;

  out.edge_mass = profiles.mass_first + profiles.mass_second;
  out.js = js_divergence(profiles.first, profiles.second,
                         profiles.mass_first / out.edge_mass,
                         profiles.mass_second / out.edge_mass);

  double size_a = profiles.mass_first;
  double size_b = profiles.mass_second;
  if (kind == MergeKind::source) {
    size_a = model.source_sizes()[a];
    size_b = model.source_sizes()[b];
  } else if (kind == MergeKind::target) {
    size_a = model.target_sizes()[a];
    size_b = model.target_sizes()[b];
  }
  out.vertex_count = size_a + size_b;
  out.js_vertex = js_divergence(profiles.first, profiles.second,
                                size_a / out.vertex_count,
                                size_b / out.vertex_count);

  out.approx_edge_mass = out.edge_mass * out.js;
  out.approx_vertex_count = out.vertex_count * out.js_vertex;
  const double exact = out.exact.delta;
  out.relative_gap = exact != 0.0
                         ? std::fabs(exact - out.approx_edge_mass) / std::fabs(exact)
                         : std::fabs(out.approx_edge_mass);
  return out;
}

}  // namespace tricluster

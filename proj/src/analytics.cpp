#include "tricluster/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tricluster {

namespace {

// x/E * log(x E / (u v)), with u v / E the count expected under independence.
// Exactly zero when the observed and expected counts coincide.
double contribution(std::uint64_t x, std::uint64_t edges, std::uint64_t u,
                    std::uint64_t v) {
  if (x == 0) return 0.0;
  const auto lhs = static_cast<unsigned __int128>(x) * edges;
  const auto rhs = static_cast<unsigned __int128>(u) * v;
  if (lhs == rhs) return 0.0;
  const double e = static_cast<double>(edges);
  return static_cast<double>(x) / e *
         (std::log(static_cast<double>(x)) + std::log(e) -
          std::log(static_cast<double>(u)) - std::log(static_cast<double>(v)));
}

double compensated_total(const std::vector<MIEntry>& entries) {
  double sum = 0.0;
  double carry = 0.0;
  for (const auto& entry : entries) {
    const double v = entry.contribution;
    const double t = sum + v;
    carry += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  // Mutual information is non-negative; only rounding can push it below.
  return std::max(0.0, sum + carry);
}

std::vector<double> normalized(const std::vector<std::uint64_t>& counts,
                               std::uint64_t edges) {
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(edges);
  }
  return out;
}

std::vector<std::uint64_t> pair_counts(const ImageGraphModel& model) {
  const std::uint64_t kt = model.target_clusters();
  std::vector<std::uint64_t> counts(model.source_clusters() * kt, 0);
  for (const auto& c : model.cells()) counts[c.source * kt + c.target] += c.count;
  return counts;
}

MIReport base_report(const ImageGraphModel& model,
                     const std::vector<std::uint64_t>& pairs) {
  const std::uint64_t edges = model.edge_count();
  MIReport report;
  report.p_source.assign(model.source_degrees().begin(), model.source_degrees().end());
  report.p_target.assign(model.target_degrees().begin(), model.target_degrees().end());
  for (auto& p : report.p_source) p /= static_cast<double>(edges);
  for (auto& p : report.p_target) p /= static_cast<double>(edges);
  report.p_pair = normalized(pairs, edges);
  return report;
}

}  // namespace

MIReport mutual_info_clusters(const ImageGraphModel& model) {
  const std::uint64_t edges = model.edge_count();
  const std::uint64_t ks = model.source_clusters();
  const std::uint64_t kt = model.target_clusters();
  const auto pairs = pair_counts(model);
  MIReport report = base_report(model, pairs);
  report.entries.reserve(ks * kt);
  const double e2 = static_cast<double>(edges) * static_cast<double>(edges);
  for (ClusterIndex i = 0; i < ks; ++i) {
    for (ClusterIndex j = 0; j < kt; ++j) {
      const auto di = model.source_degrees()[i];
      const auto dj = model.target_degrees()[j];
      MIEntry entry;
      entry.source = i;
      entry.target = j;
      entry.joint_p = report.p_pair[i * kt + j];
      entry.expected_p = static_cast<double>(di) * static_cast<double>(dj) / e2;
      entry.contribution = contribution(pairs[i * kt + j], edges, di, dj);
      report.entries.push_back(entry);
    }
  }
  report.total_mi = compensated_total(report.entries);
  return report;
}

MIReport mutual_info_time(const ImageGraphModel& model) {
  const std::uint64_t edges = model.edge_count();
  const std::uint64_t kt = model.target_clusters();
  const std::uint64_t ns = model.segments();
  const auto pairs = pair_counts(model);
  MIReport report = base_report(model, pairs);
  report.over_time = true;

  std::vector<std::uint64_t> sizes(ns);
  for (SegmentIndex n = 0; n < ns; ++n) sizes[n] = model.segmentation().size(n);
  report.p_segment = normalized(sizes, edges);

  // Cells are sorted by (source, target, segment), the grid's own order.
  const auto cells = model.cells();
  std::size_t next = 0;
  report.entries.reserve(pairs.size() * ns);
  const double e2 = static_cast<double>(edges) * static_cast<double>(edges);
  for (ClusterIndex i = 0; i < model.source_clusters(); ++i) {
    for (ClusterIndex j = 0; j < kt; ++j) {
      const auto pair = pairs[i * kt + j];
      for (SegmentIndex n = 0; n < ns; ++n) {
        std::uint64_t x = 0;
        if (next < cells.size() && cells[next].source == i &&
            cells[next].target == j && cells[next].segment == n) {
          x = cells[next++].count;
        }
        MIEntry entry;
        entry.source = i;
        entry.target = j;
        entry.segment = n;
        entry.joint_p = static_cast<double>(x) / static_cast<double>(edges);
        entry.expected_p =
            static_cast<double>(pair) * static_cast<double>(sizes[n]) / e2;
        entry.contribution = contribution(x, edges, pair, sizes[n]);
        report.entries.push_back(entry);
      }
    }
  }
  report.total_mi = compensated_total(report.entries);
  return report;
}

MIReport in_bits(MIReport report) {
  const double scale = 1.0 / std::numbers::ln2;
  report.total_mi *= scale;
  for (auto& entry : report.entries) entry.contribution *= scale;
  return report;
}

}  // namespace tricluster

#pragma once

// Mutual-information readings of a fitted model: dependence between source
// and target clusters, and between cluster pairs and time segments. Values
// are empirical frequencies of the cell counts, in nats.

#include <cstdint>
#include <vector>

#include "tricluster/image_graph.hpp"

namespace tricluster {

struct MIEntry {
  ClusterIndex source = 0;
  ClusterIndex target = 0;
  SegmentIndex segment = 0;  // 0 for the pair analysis
  double joint_p = 0.0;
  double expected_p = 0.0;  // product of the marginals
  double contribution = 0.0;  // joint_p * log(joint_p / expected_p), 0 when joint_p = 0
};

struct MIReport {
  bool over_time = false;
  double total_mi = 0.0;
  // Every cell of the grid, ordered by (source, target, segment).
  std::vector<MIEntry> entries;
  std::vector<double> p_source;
  std::vector<double> p_target;
  std::vector<double> p_segment;  // over_time only
  std::vector<double> p_pair;     // source-major K_S x K_T table
};

// MI(C_S, C_T), summing the cells over time segments.
MIReport mutual_info_clusters(const ImageGraphModel& model);
// MI((C_S, C_T), I): cluster pairs against time segments.
MIReport mutual_info_time(const ImageGraphModel& model);

// The same report with totals and contributions expressed in bits.
MIReport in_bits(MIReport report);

}  // namespace tricluster

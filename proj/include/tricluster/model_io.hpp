#pragma once

// Model documents (JSON) and the tab-separated reports built from models.
// Every floating value is written so that reading it back gives the same
// double.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tricluster/analytics.hpp"
#include "tricluster/image_graph.hpp"
#include "tricluster/simplifier.hpp"

namespace tricluster {

inline constexpr int kModelFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g
std::string format_double(double value);

// Vertex names and degrees, cluster memberships, segments with their 1-based
// rank bounds and timestamp bounds, cells as (source, target, segment,
// count) and the criterion breakdown.
void write_model(std::ostream& out, const ImageGraphModel& model);
ImageGraphModel read_model(std::istream& in);
ImageGraphModel load_model(const std::filesystem::path& path);

// step, merge_kind, operand_a, operand_b, delta_nats, total_cost_nats, tau
void write_trace(std::ostream& out, const CoarseningTrace& trace);

// A `# total_mi` line, then one row per grid cell. Values are taken as they
// are in the report; `unit` only labels them.
void write_mi_report(std::ostream& out, const MIReport& report,
                     const std::string& unit = "nats");

void write_membership(std::ostream& out, const ImageGraphModel& model);
void write_segments(std::ostream& out, const ImageGraphModel& model);
void write_cells(std::ostream& out, const ImageGraphModel& model);

}  // namespace tricluster

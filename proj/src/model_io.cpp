#include "tricluster/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "tricluster/criterion.hpp"

namespace tricluster {

namespace {

using Json = nlohmann::ordered_json;

Json side_json(const std::vector<std::string>& names,
               const std::vector<std::uint32_t>& degrees, const Partition& p) {
  Json clusters = Json::array();
  for (const auto& members : p.members()) clusters.push_back(members);
  return Json{{"vertices", names}, {"degrees", degrees}, {"clusters", clusters}};
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw FormatError(std::string("model document lacks '") + key + "'");
  }
  return j.at(key).get<T>();
}

Partition side_partition(const Json& side, std::size_t vertices) {
  const auto clusters = field<std::vector<std::vector<std::uint32_t>>>(side, "clusters");
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  Partition p;
  p.assignment.assign(vertices, kUnset);
  p.cluster_count = static_cast<ClusterIndex>(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto v : clusters[c]) {
      if (v >= vertices || p.assignment[v] != kUnset) {
        throw FormatError("cluster membership lists are not a partition");
      }
      p.assignment[v] = static_cast<ClusterIndex>(c);
    }
  }
  for (auto c : p.assignment) {
    if (c == kUnset) throw FormatError("a vertex belongs to no cluster");
  }
  return p;
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_model(std::ostream& out, const ImageGraphModel& model) {
  const auto& g = model.graph();
  const auto breakdown = cost(model);
  const auto& seg = model.segmentation();

  Json segments = Json::array();
  for (SegmentIndex n = 0; n < model.segments(); ++n) {
    segments.push_back(Json{{"first_rank", seg.begin(n) + 1},
                            {"last_rank", seg.end(n)},
                            {"time_lo", seg.time_lo[n]},
                            {"time_hi", seg.time_hi[n]},
                            {"edges", seg.size(n)}});
  }
  Json cells = Json::array();
  for (const auto& c : model.cells()) {
    cells.push_back(Json::array({c.source, c.target, c.segment, c.count}));
  }
  Json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["edge_count"] = g.edge_count;
  doc["sources"] = side_json(g.source_names, g.out_degrees, model.source_partition());
  doc["targets"] = side_json(g.target_names, g.in_degrees, model.target_partition());
  doc["segments"] = std::move(segments);
  doc["cells"] = std::move(cells);
  doc["criterion"] = Json{{"prior_counts", breakdown.prior_counts},
                          {"prior_partitions", breakdown.prior_partitions},
                          {"prior_cells", breakdown.prior_cells},
                          {"prior_degrees", breakdown.prior_degrees},
                          {"lik_cells", breakdown.lik_cells},
                          {"lik_degrees", breakdown.lik_degrees},
                          {"lik_time", breakdown.lik_time},
                          {"total", breakdown.total},
                          {"stirling_approximate", breakdown.stirling_approximate}};
  out << doc.dump(1) << '\n';
}

ImageGraphModel read_model(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    const int version = field<int>(doc, "format_version");
    if (version != kModelFormatVersion) {
      throw FormatError("unsupported model format version " + std::to_string(version));
    }
    auto summary = std::make_shared<GraphSummary>();
    summary->edge_count = field<std::uint64_t>(doc, "edge_count");
    const Json& sources = doc.at("sources");
    const Json& targets = doc.at("targets");
    summary->source_names = field<std::vector<std::string>>(sources, "vertices");
    summary->target_names = field<std::vector<std::string>>(targets, "vertices");
    summary->out_degrees = field<std::vector<std::uint32_t>>(sources, "degrees");
    summary->in_degrees = field<std::vector<std::uint32_t>>(targets, "degrees");
    if (summary->out_degrees.size() != summary->source_names.size() ||
        summary->in_degrees.size() != summary->target_names.size()) {
      throw FormatError("vertex names and degrees differ in length");
    }
    Partition sp = side_partition(sources, summary->source_names.size());
    Partition tp = side_partition(targets, summary->target_names.size());

    TimeSegmentation seg;
    seg.edge_count = static_cast<std::uint32_t>(summary->edge_count);
    for (const auto& s : doc.at("segments")) {
      const auto first = field<std::uint32_t>(s, "first_rank");
      if (first == 0) throw FormatError("segment ranks are 1-based");
      seg.starts.push_back(first - 1);
      seg.time_lo.push_back(field<double>(s, "time_lo"));
      seg.time_hi.push_back(field<double>(s, "time_hi"));
    }
    std::vector<Cell> cells;
    for (const auto& c : doc.at("cells")) {
      const auto v = c.get<std::vector<std::uint32_t>>();
      if (v.size() != 4) throw FormatError("cells must be quadruples");
      cells.push_back({v[0], v[1], v[2], v[3]});
    }
    ImageGraphModel model(std::move(summary), std::move(sp), std::move(tp),
                          std::move(seg), std::move(cells));
    model.validate();
    return model;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("inconsistent model document: ") + e.what());
  }
}

ImageGraphModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path.string());
  return read_model(in);
}

void write_trace(std::ostream& out, const CoarseningTrace& trace) {
  out << "step\tmerge_kind\toperand_a\toperand_b\tdelta_nats\ttotal_cost_nats\ttau\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out << i + 1 << '\t' << to_string(s.merge.kind) << '\t' << s.merge.a << '\t'
        << s.merge.b << '\t' << format_double(s.merge.delta) << '\t'
        << format_double(s.total_cost) << '\t' << format_double(s.tau) << '\n';
  }
}

void write_mi_report(std::ostream& out, const MIReport& report,
                     const std::string& unit) {
  out << "# total_mi\t" << format_double(report.total_mi) << '\t' << unit << '\n';
  out << "source_cluster\ttarget_cluster";
  if (report.over_time) out << "\tsegment";
  out << "\tjoint_p\texpected_p\tcontribution_" << unit << '\n';
  for (const auto& e : report.entries) {
    out << e.source << '\t' << e.target;
    if (report.over_time) out << '\t' << e.segment;
    out << '\t' << format_double(e.joint_p) << '\t' << format_double(e.expected_p)
        << '\t' << format_double(e.contribution) << '\n';
  }
}

void write_membership(std::ostream& out, const ImageGraphModel& model) {
  const auto& g = model.graph();
  out << "side\tvertex\tcluster\n";
  for (std::size_t v = 0; v < g.source_names.size(); ++v) {
    out << "source\t" << g.source_names[v] << '\t'
        << model.source_partition().assignment[v] << '\n';
  }
  for (std::size_t v = 0; v < g.target_names.size(); ++v) {
    out << "target\t" << g.target_names[v] << '\t'
        << model.target_partition().assignment[v] << '\n';
  }
}

void write_segments(std::ostream& out, const ImageGraphModel& model) {
  const auto& seg = model.segmentation();
  out << "segment\tfirst_rank\tlast_rank\ttime_lo\ttime_hi\tedges\n";
  for (SegmentIndex n = 0; n < model.segments(); ++n) {
    out << n << '\t' << seg.begin(n) + 1 << '\t' << seg.end(n) << '\t'
        << format_double(seg.time_lo[n]) << '\t' << format_double(seg.time_hi[n])
        << '\t' << seg.size(n) << '\n';
  }
}

void write_cells(std::ostream& out, const ImageGraphModel& model) {
  out << "source_cluster\ttarget_cluster\tsegment\tcount\n";
  for (const auto& c : model.cells()) {
    out << c.source << '\t' << c.target << '\t' << c.segment << '\t' << c.count << '\n';
  }
}

}  // namespace tricluster

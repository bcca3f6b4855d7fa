#include "commands.hpp"

#include <sys/resource.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "tricluster/analytics.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/model_io.hpp"
#include "tricluster/simplifier.hpp"
#include "tricluster/synthgen.hpp"
#include "tricluster/temporal_graph.hpp"

namespace tricluster::cli {

namespace {

using Json = nlohmann::ordered_json;

template <typename T>
T parse_number(std::string_view text, const std::string& what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("invalid value '" + std::string(text) + "' for " + what);
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint64_t peak_rss_bytes() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;
}

Json config_json(const OptimizerConfig& c) {
  return Json{{"vns_restarts", c.vns_restarts},
              {"vns_max_neighborhood", c.vns_max_neighborhood},
              {"seed", c.seed},
              {"pre_aggregation_threshold", c.pre_aggregation_threshold},
              {"threads", c.threads}};
}

struct GenOptions {
  std::string protocol = "patterned";
  std::uint64_t edges = 8192;
  double noise = 0.3;
  std::uint64_t seed = 1;
  std::string output;
  std::string truth;
};

struct FitOptions {
  std::string input;
  std::string output;
  std::string manifest;
  std::string config_file;
  bool undirected = false;
  std::optional<std::uint32_t> restarts;
  std::optional<std::uint32_t> max_neighborhood;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> pre_aggregation;
  std::optional<std::uint32_t> threads;
};

struct SimplifyOptions {
  std::string model;
  double tau = 1.0;
  std::string output;
  std::string trace;
};

struct AnalyzeOptions {
  std::string model;
  std::string mode = "pairs";
  bool bits = false;
  std::string output;
};

struct ExportOptions {
  std::string model;
  std::string prefix;
};

void cmd_gen(const GenOptions& o, std::ostream& out) {
  PatternSpec spec = PatternSpec::standard();
  spec.num_edges = o.edges;
  spec.noise_fraction = o.noise;
  spec.seed = o.seed;
  SyntheticGraph data = generate_patterned(spec);
  if (o.protocol == "stationary" || o.protocol == "random") {
    data.graph = shuffle_timestamps(data.graph, o.seed);
  }
  if (o.protocol == "random") data.graph = rewire_all(data.graph, o.seed);

  write_atomically(o.output, [&](std::ostream& s) { write_edge_list(s, data.graph); });
  const std::string truth = o.truth.empty() ? o.output + ".truth.tsv" : o.truth;
  // Shuffling and rewiring invalidate the per-edge labels; the vertex
  // clusters still describe how the pattern was planted.
  write_atomically(truth, [&](std::ostream& s) { write_ground_truth(s, data); });
  out << "wrote " << data.graph.num_edges() << " edges to " << o.output << '\n';
}

void cmd_fit(const FitOptions& o, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  OptimizerConfig config;
  if (!o.config_file.empty()) config = read_config_file(o.config_file, config);
  if (o.restarts) config.vns_restarts = *o.restarts;
  if (o.max_neighborhood) config.vns_max_neighborhood = *o.max_neighborhood;
  if (o.seed) config.seed = *o.seed;
  if (o.pre_aggregation) config.pre_aggregation_threshold = *o.pre_aggregation;
  config.threads = resolve_threads(o.threads, config.threads);
  config.validate();

  const TemporalGraph graph = load_edge_list(o.input, o.undirected);
  if (graph.empty()) throw IngestionError(o.input + ": the graph has no edges");

  const ImageGraphModel model = vns_optimize(graph, config);
  const auto breakdown = cost(model);
  write_atomically(o.output, [&](std::ostream& s) { write_model(s, model); });

  const std::string manifest = o.manifest.empty() ? o.output + ".manifest.json" : o.manifest;
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - started).count();
  Json doc;
  doc["tool"] = "tricluster";
  doc["version"] = kToolVersion;
  doc["command"] = "fit";
  doc["inputs"] = Json::array({o.input});
  doc["undirected"] = o.undirected;
  doc["config"] = config_json(config);
  doc["seed"] = config.seed;
  doc["edges"] = graph.num_edges();
  doc["wall_seconds"] = wall;
  doc["peak_rss_bytes"] = peak_rss_bytes();
  doc["outputs"] = Json::array({o.output});
  doc["cost_nats"] = breakdown.total;
  write_atomically(manifest, [&](std::ostream& s) { s << doc.dump(1) << '\n'; });

  out << "source clusters " << model.source_clusters() << ", target clusters "
      << model.target_clusters() << ", segments " << model.segments()
      << ", cost " << format_double(breakdown.total) << " nats\n";
}

void cmd_simplify(const SimplifyOptions& o, std::ostream& out) {
  const ImageGraphModel model = load_model(o.model);
  auto [simplified, trace] = coarsen_to_informativity(model, o.tau);
  const std::string trace_path = o.trace.empty() ? o.output + ".trace.tsv" : o.trace;
  write_atomically(o.output, [&](std::ostream& s) { write_model(s, simplified); });
  write_atomically(trace_path, [&](std::ostream& s) { write_trace(s, trace); });
  out << trace.steps.size() << " merges; source clusters "
      << simplified.source_clusters() << ", target clusters "
      << simplified.target_clusters() << ", segments " << simplified.segments() << '\n';
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const ImageGraphModel model = load_model(o.model);
  MIReport report = o.mode == "time" ? mutual_info_time(model) : mutual_info_clusters(model);
  if (o.bits) report = in_bits(std::move(report));
  const std::string unit = o.bits ? "bits" : "nats";
  write_atomically(o.output, [&](std::ostream& s) { write_mi_report(s, report, unit); });
  out << "total_mi " << format_double(report.total_mi) << ' ' << unit << '\n';
}

void cmd_export(const ExportOptions& o, std::ostream& out) {
  const ImageGraphModel model = load_model(o.model);
  write_atomically(o.prefix + ".membership.tsv",
                   [&](std::ostream& s) { write_membership(s, model); });
  write_atomically(o.prefix + ".segments.tsv",
                   [&](std::ostream& s) { write_segments(s, model); });
  write_atomically(o.prefix + ".cells.tsv",
                   [&](std::ostream& s) { write_cells(s, model); });
  out << "wrote " << o.prefix << ".{membership,segments,cells}.tsv\n";
}

}  // namespace

OptimizerConfig read_config_file(const std::filesystem::path& path,
                                 OptimizerConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = trim(text.substr(0, hash));
    }
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const std::string where = path.string() + ":" + std::to_string(line_no) + " " + key;
    if (key == "vns_restarts") {
      base.vns_restarts = parse_number<std::uint32_t>(value, where);
    } else if (key == "vns_max_neighborhood") {
      base.vns_max_neighborhood = parse_number<std::uint32_t>(value, where);
    } else if (key == "seed") {
      base.seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "pre_aggregation_threshold") {
      base.pre_aggregation_threshold = parse_number<std::uint64_t>(value, where);
    } else if (key == "threads") {
      base.threads = parse_number<std::uint32_t>(value, where);
    } else {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
  return base;
}

std::uint32_t resolve_threads(std::optional<std::uint32_t> flag,
                              std::uint32_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TRICLUSTER_THREADS"); env && *env) {
    return parse_number<std::uint32_t>(trim(env), "TRICLUSTER_THREADS");
  }
  return fallback;
}

void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& body) {
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    try {
      body(out);
      out.flush();
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parameter-free triclustering of temporal directed multigraphs"};
  app.name("tricluster");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an artificial temporal graph");
  gen_cmd->add_option("--protocol", gen.protocol, "patterned, stationary or random")
      ->check(CLI::IsMember({"patterned", "stationary", "random"}));
  gen_cmd->add_option("--edges", gen.edges, "Number of edges")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--noise", gen.noise, "Fraction of rewired edges")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("-o,--output", gen.output, "Edge list to write")->required();
  gen_cmd->add_option("--truth", gen.truth, "Ground truth file (default: <output>.truth.tsv)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the best tricluster model to an edge list");
  fit_cmd->add_option("input", fit.input, "Tab-separated edge list")->required();
  fit_cmd->add_option("-o,--output", fit.output, "Model file to write")->required();
  fit_cmd->add_option("--manifest", fit.manifest,
                      "Run manifest (default: <output>.manifest.json)");
  fit_cmd->add_option("--config", fit.config_file, "key = value optimizer settings");
  fit_cmd->add_flag("--undirected", fit.undirected, "Read every line in both directions");
  fit_cmd->add_option("--restarts", fit.restarts, "vns_restarts")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-neighborhood", fit.max_neighborhood, "vns_max_neighborhood");
  fit_cmd->add_option("--seed", fit.seed, "Random seed");
  fit_cmd->add_option("--pre-aggregation-threshold", fit.pre_aggregation,
                      "Vertex count above which the start model is pre-aggregated");
  fit_cmd->add_option("--threads", fit.threads, "Worker threads, 0 for all cores");

  SimplifyOptions simplify;
  auto* simplify_cmd = app.add_subcommand("simplify", "Coarsen a model down to an informativity");
  simplify_cmd->add_option("model", simplify.model, "Model file")->required();
  simplify_cmd->add_option("--informativity", simplify.tau, "Target informativity in (0, 1]")
      ->required()
      ->check(CLI::Validator(
          [](const std::string& s) -> std::string {
            double v = 0.0;
            try {
              v = std::stod(s);
            } catch (...) {
              return "not a number";
            }
            return v > 0.0 && v <= 1.0 ? "" : "must lie in (0, 1]";
          },
          "(0,1]"));
  simplify_cmd->add_option("-o,--output", simplify.output, "Simplified model file")->required();
  simplify_cmd->add_option("--trace", simplify.trace, "Trace file (default: <output>.trace.tsv)");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Mutual-information report of a model");
  analyze_cmd->add_option("model", analyze.model, "Model file")->required();
  analyze_cmd->add_option("--mode", analyze.mode, "pairs or time")
      ->check(CLI::IsMember({"pairs", "time"}));
  analyze_cmd->add_flag("--bits", analyze.bits, "Report in bits instead of nats");
  analyze_cmd->add_option("-o,--output", analyze.output, "Report file")->required();

  ExportOptions exp;
  auto* export_cmd = app.add_subcommand("export", "Write a model as tab-separated tables");
  export_cmd->add_option("model", exp.model, "Model file")->required();
  export_cmd->add_option("--prefix", exp.prefix, "Output path prefix")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code;
  }

  try {
    if (*gen_cmd) cmd_gen(gen, out);
    if (*fit_cmd) cmd_fit(fit, out);
    if (*simplify_cmd) cmd_simplify(simplify, out);
    if (*analyze_cmd) cmd_analyze(analyze, out);
    if (*export_cmd) cmd_export(exp, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tricluster::cli

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tricluster/optimizer.hpp"

namespace tricluster::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Runs the command line; returns the process exit status. Diagnostics go to
// `err`, anything informative to `out`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Applies `key = value` lines ('#' comments allowed) over `base`.
// Unknown keys and malformed values throw std::invalid_argument.
OptimizerConfig read_config_file(const std::filesystem::path& path,
                                 OptimizerConfig base);

// --threads, else TRICLUSTER_THREADS, else `fallback` (the config file's
// value or the default). 0 means one worker per hardware thread.
std::uint32_t resolve_threads(std::optional<std::uint32_t> flag,
                              std::uint32_t fallback);

// Writes through a temporary sibling and renames it into place, so readers
// never observe a partial file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& body);

}  // namespace tricluster::cli

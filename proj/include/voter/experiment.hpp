#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "voter/graph.hpp"

namespace voter {

/// Flat key/value description of a named experiment. Every field maps to a
/// config-file key of the same name (underscores) and to a CLI flag.
struct ExperimentConfig {
  std::string experiment;
  std::string topology = "line";  // line | scale-free | file
  std::string graph_file;
  std::size_t n = 50;
  std::size_t m = 1;  // scale-free attachments per vertex
  std::uint64_t graph_seed = 1;
  std::vector<double> eps;
  std::vector<std::size_t> tau;
  std::vector<std::size_t> sizes;
  std::size_t runs = 10'000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string mode = "steady";  // steady | transient
  std::size_t horizon = 0;      // 0: experiment default
  std::optional<std::size_t> burn_in;
  std::size_t agent = 1;
  std::string force = "0";      // agent index or "none"
  std::string spacing = "auto";
  std::size_t m_max = 50;
  double tol = 1e-14;
  unsigned workers = 1;
  std::string out = ".";
};

const std::vector<std::string>& experiment_names();

/// Sets one key; throws InvalidArgument on unknown keys or malformed values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Lines of the form "key = value"; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// "a,b,c" or the inclusive grid "lo:hi:count".
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::size_t> parse_count_list(const std::string& text);

/// Graph described by topology, n, m, graph_seed and graph_file.
Graph build_topology(const ExperimentConfig& config);

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;  // data files, then the metadata sidecar
};

/// Writes <experiment>.csv (or .txt) and <experiment>.json into config.out.
/// The only run-dependent field is "generated_at" in the sidecar.
ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace voter

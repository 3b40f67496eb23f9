#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsvm/data.hpp"
#include "dsvm/errors.hpp"
#include "dsvm/graph.hpp"
#include "dsvm/integrator.hpp"
#include "dsvm/problem.hpp"

namespace dsvm {

/// One simulation, as a single JSON document:
///
///   {
///     "dataset": "data.csv",              // or "synthetic": {n_per_class, dim, separation, seed}
///     "header": false,                    // skip one line of the dataset CSV
///     "nodes": 3,
///     "topology": "path",                 // or "edges": [[0,1],[1,2]]
///     "partition": "round_robin",         // or "contiguous"
///     "C": 1.0,
///     "slack_multiplier_sign": "minus",   // or "plus"
///     "flow": {"step_size": 1e-3, "max_steps": 2000000, "stop_tol": 1e-6,
///              "record_every": 100, "method": "euler",
///              "init": {"kind": "zeros"}},  // or {"kind": "random", "scale": 1, "seed": 0}
///     "output_dir": "run",
///     "snapshots": false
///   }
///
/// Every key except the dataset source and "nodes" has the default shown.
struct RunConfig {
  std::optional<std::filesystem::path> dataset_path;
  std::optional<SyntheticSpec> synthetic;
  bool header = false;

  Index nodes = 0;
  std::optional<std::string> topology;
  std::vector<Edge> edges;

  PartitionStrategy partition = PartitionStrategy::round_robin;
  double C = 1.0;
  SlackMultiplierSign slack_sign = SlackMultiplierSign::minus;
  FlowConfig flow;
  std::filesystem::path output_dir = "run";

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Relative dataset and output paths are resolved against `base_dir`.
/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

Dataset materialize_dataset(const RunConfig& cfg);
/// Throws InvalidEdge or DisconnectedGraph.
Graph build_graph(const RunConfig& cfg);
Problem<double> build_problem(const RunConfig& cfg, const Dataset& dataset);

nlohmann::json to_json(const SyntheticSpec& spec);

}  // namespace dsvm

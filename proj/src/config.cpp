#include "dsvm/config.hpp"

#include <cmath>
#include <set>

#include "dsvm/trace_io.hpp"

namespace dsvm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

double get_number(const json& j, const std::string& key, const std::string& field) {
  const json& v = j.at(key);
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& j, const std::string& key, const std::string& field) {
  const json& v = j.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  // Accept integral floats such as 2e6.
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.0e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  fail(field, "expected an integer");
}

std::string get_string(const json& j, const std::string& key, const std::string& field) {
  const json& v = j.at(key);
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& j, const std::string& key, const std::string& field) {
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
  }
}

SyntheticSpec parse_synthetic(const json& j) {
  if (!j.is_object()) fail("synthetic", "expected an object");
  reject_unknown(j, {"n_per_class", "dim", "separation", "seed"}, "synthetic");
  SyntheticSpec s;
  for (const char* key : {"n_per_class", "dim", "separation"}) {
    if (!j.contains(key)) fail(std::string("synthetic.") + key, "missing");
  }
  s.n_per_class = get_integer(j, "n_per_class", "synthetic.n_per_class");
  s.dim = get_integer(j, "dim", "synthetic.dim");
  s.separation = get_number(j, "separation", "synthetic.separation");
  if (j.contains("seed")) {
    const std::int64_t seed = get_integer(j, "seed", "synthetic.seed");
    if (seed < 0) fail("synthetic.seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  return s;
}

FlowConfig parse_flow(const json& j) {
  if (!j.is_object()) fail("flow", "expected an object");
  reject_unknown(j, {"step_size", "max_steps", "stop_tol", "record_every", "method", "init"},
                 "flow");
  FlowConfig f;
  if (j.contains("step_size")) f.step_size = get_number(j, "step_size", "flow.step_size");
  if (j.contains("max_steps")) f.max_steps = get_integer(j, "max_steps", "flow.max_steps");
  if (j.contains("stop_tol")) f.stop_tol = get_number(j, "stop_tol", "flow.stop_tol");
  if (j.contains("record_every")) {
    f.record_every = get_integer(j, "record_every", "flow.record_every");
  }
  if (j.contains("method")) {
    const std::string m = get_string(j, "method", "flow.method");
    if (m == "euler") {
      f.method = StepMethod::euler;
    } else if (m == "rk4") {
      f.method = StepMethod::rk4;
    } else {
      fail("flow.method", "expected 'euler' or 'rk4', got '" + m + "'");
    }
  }
  if (j.contains("init")) {
    const json& init = j["init"];
    if (!init.is_object()) fail("flow.init", "expected an object");
    reject_unknown(init, {"kind", "scale", "seed"}, "flow.init");
    const std::string kind = init.contains("kind") ? get_string(init, "kind", "flow.init.kind")
                                                   : std::string("zeros");
    if (kind == "zeros") {
      f.init.kind = InitSpec::Kind::zeros;
    } else if (kind == "random") {
      f.init.kind = InitSpec::Kind::seeded_random;
    } else {
      fail("flow.init.kind", "expected 'zeros' or 'random', got '" + kind + "'");
    }
    if (init.contains("scale")) f.init.scale = get_number(init, "scale", "flow.init.scale");
    if (init.contains("seed")) {
      const std::int64_t seed = get_integer(init, "seed", "flow.init.seed");
      if (seed < 0) fail("flow.init.seed", "must be >= 0");
      f.init.seed = static_cast<std::uint64_t>(seed);
    }
  }
  return f;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

void RunConfig::validate() const {
  if (dataset_path.has_value() == synthetic.has_value()) {
    fail("dataset", "give exactly one of 'dataset' (CSV path) or 'synthetic'");
  }
  if (synthetic) {
    if (synthetic->n_per_class < 1) fail("synthetic.n_per_class", "must be >= 1");
    if (synthetic->dim < 1) fail("synthetic.dim", "must be >= 1");
    if (!(synthetic->separation > 0.0)) fail("synthetic.separation", "must be > 0");
  }
  if (nodes < 1) fail("nodes", "must be >= 1");
  if (topology && !edges.empty()) fail("topology", "give either 'topology' or 'edges', not both");
  if (topology && *topology != "complete" && *topology != "path" && *topology != "ring") {
    fail("topology", "expected 'complete', 'path' or 'ring', got '" + *topology + "'");
  }
  if (!topology && edges.empty() && nodes > 1) {
    fail("edges", "a graph with more than one node needs 'topology' or 'edges'");
  }
  if (!(C > 0.0) || !std::isfinite(C)) fail("C", "must be a finite number > 0");
  if (!(flow.step_size > 0.0)) fail("flow.step_size", "must be > 0");
  if (flow.max_steps < 1) fail("flow.max_steps", "must be >= 1");
  if (!(flow.stop_tol > 0.0)) fail("flow.stop_tol", "must be > 0");
  if (flow.record_every < 1) fail("flow.record_every", "must be >= 1");
  if (flow.init.kind == InitSpec::Kind::seeded_random && !(flow.init.scale > 0.0)) {
    fail("flow.init.scale", "must be > 0");
  }
  if (output_dir.empty()) fail("output_dir", "must not be empty");
}

RunConfig parse_run_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  reject_unknown(j,
                 {"dataset", "synthetic", "header", "nodes", "topology", "edges", "partition",
                  "C", "slack_multiplier_sign", "flow", "output_dir", "snapshots"},
                 "");
  RunConfig cfg;
  if (j.contains("dataset")) {
    cfg.dataset_path = resolve(get_string(j, "dataset", "dataset"), base_dir);
  }
  if (j.contains("synthetic")) cfg.synthetic = parse_synthetic(j["synthetic"]);
  if (j.contains("header")) cfg.header = get_bool(j, "header", "header");

  if (!j.contains("nodes")) fail("nodes", "missing");
  cfg.nodes = get_integer(j, "nodes", "nodes");
  if (j.contains("topology")) cfg.topology = get_string(j, "topology", "topology");
  if (j.contains("edges")) {
    const json& e = j["edges"];
    if (!e.is_array()) fail("edges", "expected an array of [u, v] pairs");
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string field = "edges[" + std::to_string(k) + "]";
      if (!e[k].is_array() || e[k].size() != 2 || !e[k][0].is_number_integer() ||
          !e[k][1].is_number_integer()) {
        fail(field, "expected a pair of integer node indices");
      }
      cfg.edges.emplace_back(e[k][0].get<Index>(), e[k][1].get<Index>());
    }
  }
  if (j.contains("partition")) {
    const std::string s = get_string(j, "partition", "partition");
    if (s == "contiguous") {
      cfg.partition = PartitionStrategy::contiguous;
    } else if (s == "round_robin") {
      cfg.partition = PartitionStrategy::round_robin;
    } else {
      fail("partition", "expected 'contiguous' or 'round_robin', got '" + s + "'");
    }
  }
  if (j.contains("C")) cfg.C = get_number(j, "C", "C");
  if (j.contains("slack_multiplier_sign")) {
    const std::string s = get_string(j, "slack_multiplier_sign", "slack_multiplier_sign");
    if (s == "minus") {
      cfg.slack_sign = SlackMultiplierSign::minus;
    } else if (s == "plus") {
      cfg.slack_sign = SlackMultiplierSign::plus;
    } else {
      fail("slack_multiplier_sign", "expected 'minus' or 'plus', got '" + s + "'");
    }
  }
  if (j.contains("flow")) cfg.flow = parse_flow(j["flow"]);
  if (j.contains("output_dir")) {
    cfg.output_dir = resolve(get_string(j, "output_dir", "output_dir"), base_dir);
  }
  if (j.contains("snapshots")) cfg.flow.record_snapshots = get_bool(j, "snapshots", "snapshots");
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

json to_json(const SyntheticSpec& spec) {
  return {{"n_per_class", spec.n_per_class},
          {"dim", spec.dim},
          {"separation", spec.separation},
          {"seed", spec.seed}};
}

json to_json(const RunConfig& cfg) {
  json j;
  if (cfg.dataset_path) j["dataset"] = cfg.dataset_path->generic_string();
  if (cfg.synthetic) j["synthetic"] = to_json(*cfg.synthetic);
  j["header"] = cfg.header;
  j["nodes"] = cfg.nodes;
  if (cfg.topology) {
    j["topology"] = *cfg.topology;
  } else {
    json edges = json::array();
    for (const auto& [a, b] : cfg.edges) edges.push_back({a, b});
    j["edges"] = edges;
  }
  j["partition"] = std::string(to_string(cfg.partition));
  j["C"] = cfg.C;
  j["slack_multiplier_sign"] = std::string(to_string(cfg.slack_sign));
  json init = {{"kind", cfg.flow.init.kind == InitSpec::Kind::zeros ? "zeros" : "random"}};
  if (cfg.flow.init.kind == InitSpec::Kind::seeded_random) {
    init["scale"] = cfg.flow.init.scale;
    init["seed"] = cfg.flow.init.seed;
  }
  j["flow"] = {{"step_size", cfg.flow.step_size},
               {"max_steps", cfg.flow.max_steps},
               {"stop_tol", cfg.flow.stop_tol},
               {"record_every", cfg.flow.record_every},
               {"method", std::string(to_string(cfg.flow.method))},
               {"init", init}};
  j["output_dir"] = cfg.output_dir.generic_string();
  j["snapshots"] = cfg.flow.record_snapshots;
  return j;
}

Dataset materialize_dataset(const RunConfig& cfg) {
  if (cfg.synthetic) return gen_synthetic(*cfg.synthetic);
  return load_dataset(*cfg.dataset_path, cfg.header);
}

Graph build_graph(const RunConfig& cfg) {
  if (cfg.topology) return Graph::from_topology(*cfg.topology, cfg.nodes);
  return Graph(cfg.nodes, cfg.edges);
}

Problem<double> build_problem(const RunConfig& cfg, const Dataset& dataset) {
  Graph g = build_graph(cfg);
  const NodePartition part = partition(dataset, cfg.nodes, cfg.partition);
  return Problem<double>(dataset, part, std::move(g), cfg.C, cfg.slack_sign);
}

}  // namespace dsvm

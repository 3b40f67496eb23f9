#include <gtest/gtest.h>

#include "dsvm/config.hpp"

using namespace dsvm;
using nlohmann::json;

namespace {

json minimal() {
  return {{"synthetic", {{"n_per_class", 2}, {"dim", 1}, {"separation", 4.0}, {"seed", 3}}},
          {"nodes", 2},
          {"topology", "path"}};
}

// The message of the ConfigError thrown for `j`.
std::string error_for(const json& j) {
  try {
    parse_run_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, Defaults) {
  const RunConfig cfg = parse_run_config(minimal());
  EXPECT_EQ(cfg.partition, PartitionStrategy::round_robin);
  EXPECT_EQ(cfg.C, 1.0);
  EXPECT_EQ(cfg.slack_sign, SlackMultiplierSign::minus);
  EXPECT_EQ(cfg.flow.step_size, 1e-3);
  EXPECT_EQ(cfg.flow.max_steps, 2'000'000);
  EXPECT_EQ(cfg.flow.stop_tol, 1e-6);
  EXPECT_EQ(cfg.flow.record_every, 100);
  EXPECT_EQ(cfg.flow.method, StepMethod::euler);
  EXPECT_EQ(cfg.flow.init.kind, InitSpec::Kind::zeros);
  EXPECT_FALSE(cfg.flow.record_snapshots);
  EXPECT_EQ(build_graph(cfg).edges().size(), 1u);
}

TEST(Config, FullDocument) {
  json j = minimal();
  j.erase("topology");
  j["nodes"] = 3;
  j["edges"] = {{0, 1}, {1, 2}};
  j["partition"] = "contiguous";
  j["C"] = 10;
  j["slack_multiplier_sign"] = "plus";
  j["flow"] = {{"step_size", 0.01}, {"max_steps", 2e6},   {"method", "rk4"},
               {"init", {{"kind", "random"}, {"scale", 0.5}, {"seed", 11}}}};
  j["snapshots"] = true;
  j["output_dir"] = "runs/x";
  const RunConfig cfg = parse_run_config(j, "/base");
  EXPECT_EQ(cfg.edges.size(), 2u);
  EXPECT_EQ(cfg.flow.max_steps, 2'000'000);
  EXPECT_EQ(cfg.flow.method, StepMethod::rk4);
  EXPECT_EQ(cfg.flow.init.seed, 11u);
  EXPECT_EQ(cfg.output_dir, std::filesystem::path("/base/runs/x"));

  // Serialization reproduces an equivalent config.
  const RunConfig again = parse_run_config(to_json(cfg));
  EXPECT_EQ(to_json(again), to_json(cfg));
}

TEST(Config, ErrorsNameTheField) {
  json j = minimal();
  j["C"] = -1;
  EXPECT_NE(error_for(j).find("'C'"), std::string::npos);

  j = minimal();
  j["flow"] = {{"step_size", "big"}};
  EXPECT_NE(error_for(j).find("flow.step_size"), std::string::npos);

  j = minimal();
  j["synthetic"]["separation"] = 0;
  EXPECT_NE(error_for(j).find("synthetic.separation"), std::string::npos);

  j = minimal();
  j["topology"] = "star";
  EXPECT_NE(error_for(j).find("topology"), std::string::npos);

  j = minimal();
  j["dataset"] = "x.csv";
  EXPECT_NE(error_for(j).find("dataset"), std::string::npos);

  j = minimal();
  j["colour"] = 1;
  EXPECT_NE(error_for(j).find("colour"), std::string::npos);

  j = minimal();
  j.erase("nodes");
  EXPECT_NE(error_for(j).find("nodes"), std::string::npos);

  j = minimal();
  j["edges"] = {{0, 1, 2}};
  j.erase("topology");
  EXPECT_NE(error_for(j).find("edges[0]"), std::string::npos);
}

TEST(Config, GraphErrorsSurfaceAtBuild) {
  json j = minimal();
  j.erase("topology");
  j["nodes"] = 3;
  j["edges"] = {{0, 1}};
  const RunConfig cfg = parse_run_config(j);
  EXPECT_THROW(build_graph(cfg), DisconnectedGraph);
}

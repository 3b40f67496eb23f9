#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dsvm/config.hpp"
#include "dsvm/data.hpp"
#include "dsvm/graph.hpp"
#include "dsvm/problem.hpp"
#include "dsvm/rng.hpp"
#include "dsvm/state.hpp"

namespace dsvm::testing {

/// Rows of (label, features).
inline Dataset make_dataset(const std::vector<std::pair<double, std::vector<double>>>& rows) {
  Dataset ds;
  const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].second.size());
  ds.features.resize(d, static_cast<Eigen::Index>(rows.size()));
  ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.labels(static_cast<Eigen::Index>(i)) = rows[i].first;
    for (Eigen::Index k = 0; k < d; ++k) {
      ds.features(k, static_cast<Eigen::Index>(i)) = rows[i].second[static_cast<std::size_t>(k)];
    }
  }
  return ds;
}

/// {(x=[1], y=+1), (x=[−1], y=−1)} on one edge, one sample per node, C = 10.
inline Dataset two_point_dataset() { return make_dataset({{1.0, {1.0}}, {-1.0, {-1.0}}}); }

inline Problem<double> two_point_problem(SlackMultiplierSign sign = SlackMultiplierSign::minus) {
  const Dataset ds = two_point_dataset();
  return Problem<double>(ds, partition(ds, 2, PartitionStrategy::round_robin), Graph::path(2),
                         10.0, sign);
}

/// One node, one sample.
inline Problem<double> single_sample_problem(double x, double y, double C = 1.0,
                                             SlackMultiplierSign sign = SlackMultiplierSign::minus) {
  const Dataset ds = make_dataset({{y, {x}}});
  return Problem<double>(ds, partition(ds, 1, PartitionStrategy::contiguous), Graph::path(1), C,
                         sign);
}

/// Random state: signed fields uniform in [−scale, scale], nonnegative ones
/// in [lo, scale] with lo > 0 for strictly interior points.
inline NetworkState<double> random_state(const Problem<double>& p, std::mt19937_64& rng,
                                         double scale = 1.0, double lo = 0.0) {
  NetworkState<double> s = p.zero_state();
  auto fill = [&](auto& m, bool signed_range) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double u = uniform01(rng);
      m.data()[k] = signed_range ? scale * (2.0 * u - 1.0) : lo + (scale - lo) * u;
    }
  };
  fill(s.w, true), fill(s.b, true), fill(s.xi, false), fill(s.theta, false), fill(s.mu, false),
      fill(s.alpha, true), fill(s.beta, true);
  return s;
}

/// One acceptance instance: synthetic two-blob data on a small graph.
struct AcceptanceCase {
  std::uint64_t seed;
  Eigen::Index n;  // total samples
  Eigen::Index dim;
  double C;
  const char* graph;  // "P2", "P3" or "K3"
};

inline constexpr double kAcceptanceSeparation = 4.0;

// Covers every graph with every admissible n (n ≥ m), both feature
// dimensions and both values of C.
inline const std::vector<AcceptanceCase>& acceptance_cases() {
  static const std::vector<AcceptanceCase> cases = {
      {101, 2, 1, 1.0, "P2"},  {102, 2, 2, 10.0, "P2"}, {103, 4, 1, 10.0, "P2"},
      {104, 4, 2, 1.0, "P2"},  {105, 6, 1, 1.0, "P2"},  {106, 6, 2, 10.0, "P2"},
      {107, 2, 1, 10.0, "P2"}, {108, 4, 1, 1.0, "P3"},  {109, 4, 2, 10.0, "P3"},
      {110, 6, 1, 10.0, "P3"}, {111, 6, 2, 1.0, "P3"},  {112, 4, 1, 10.0, "P3"},
      {113, 6, 2, 10.0, "P3"}, {114, 4, 1, 1.0, "K3"},  {115, 4, 2, 10.0, "K3"},
      {116, 6, 1, 10.0, "K3"}, {117, 6, 2, 1.0, "K3"},  {118, 4, 2, 1.0, "K3"},
      {119, 6, 1, 1.0, "K3"},  {120, 4, 1, 10.0, "K3"},
  };
  return cases;
}

/// Run config of an acceptance case: zeros init, h = 1e-3, stop_tol 1e-6,
/// at most 2e6 steps, snapshots every 100 steps.
inline RunConfig acceptance_config(const AcceptanceCase& c, const std::string& output_dir) {
  RunConfig cfg;
  cfg.synthetic = SyntheticSpec{c.n / 2, c.dim, kAcceptanceSeparation, c.seed};
  const std::string g(c.graph);
  cfg.nodes = g == "P2" ? 2 : 3;
  cfg.topology = g == "K3" ? "complete" : "path";
  cfg.partition = PartitionStrategy::round_robin;
  cfg.C = c.C;
  cfg.flow.step_size = 1e-3;
  cfg.flow.stop_tol = 1e-6;
  cfg.flow.max_steps = 2'000'000;
  cfg.flow.record_every = 100;
  cfg.flow.record_snapshots = true;
  cfg.output_dir = output_dir;
  return cfg;
}

}  // namespace dsvm::testing

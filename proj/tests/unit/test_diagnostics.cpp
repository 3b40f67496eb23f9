#include <gtest/gtest.h>

#include "dsvm/diagnostics.hpp"
#include "dsvm/integrator.hpp"
#include "dsvm/oracle.hpp"
#include "test_support.hpp"

using namespace dsvm;
using dsvm::testing::single_sample_problem;
using dsvm::testing::two_point_dataset;
using dsvm::testing::two_point_problem;

namespace {

NetworkState<double> two_point_optimum(const Problem<double>& p) {
  return embed_consensus(solve_consensus_reference(two_point_dataset(), 10.0, 2), p);
}

FlowResult<double> two_point_run() {
  FlowConfig cfg;
  cfg.record_snapshots = true;
  return run_flow(two_point_problem(), cfg);
}

Trace rows_with_v(std::initializer_list<double> vs, double dt) {
  Trace t;
  t.step_size = 1e-3;
  double time = 0.0;
  for (double v : vs) {
    TraceRow r;
    r.t = time;
    r.V = v;
    t.rows.push_back(r);
    time += dt;
  }
  return t;
}

}  // namespace

TEST(Diagnostics, StorageH1) {
  StateDerivative<double> f(1, 1, 1);
  f.w(0, 0) = 0.6;
  f.b(0) = 0.8;
  EXPECT_DOUBLE_EQ(storage_h1_from_field(f), 0.5);
  const Problem<double> p = single_sample_problem(1.0, 1.0);
  EXPECT_EQ(storage_h1(p.zero_state(), p), 0.0);
}

TEST(Diagnostics, StorageH2) {
  const Problem<double> p = two_point_problem();
  NetworkState<double> s = p.zero_state();
  s.w << 1.0, -1.0;
  EXPECT_EQ(storage_h2(s, p), 4.0);
  s.w.setConstant(0.3);
  s.b.setConstant(-2.0);
  EXPECT_EQ(storage_h2(s, p), 0.0);
}

TEST(Diagnostics, StorageH3AndTotal) {
  const Problem<double> p = single_sample_problem(1.0, 1.0);
  const NetworkState<double> s = p.zero_state();
  EXPECT_EQ(storage_h3(s, p), 0.5);
  EXPECT_EQ(total_lyapunov(s, p), 0.5);
  const StorageBreakdown st = storages(s, p);
  EXPECT_EQ(st.V, st.V_H1 + st.V_H2 + st.V_H3);

  // Margin satisfied and every drift pointing inward: all indices active.
  NetworkState<double> inward = p.zero_state();
  inward.w(0, 0) = 2.0;
  EXPECT_EQ(storage_h3(inward, p), 0.0);
}

TEST(Diagnostics, VanishAtFixedPoint) {
  const Problem<double> p = two_point_problem();
  const NetworkState<double> s = two_point_optimum(p);
  EXPECT_LE(storage_h1(s, p), 1e-24);
  EXPECT_LE(storage_h2(s, p), 1e-24);
  EXPECT_LE(storage_h3(s, p), 1e-24);
  EXPECT_LE(total_lyapunov(s, p), 1e-24);
}

TEST(Diagnostics, ConsensusResidual) {
  const Problem<double> p = two_point_problem();
  NetworkState<double> s = p.zero_state();
  s.w << 1.0, 0.0;
  EXPECT_EQ(consensus_residual(s, p), 1.0);
  s.w.setConstant(4.0);
  EXPECT_EQ(consensus_residual(s, p), 0.0);
}

TEST(Diagnostics, MonotoneDetector) {
  EXPECT_EQ(check_monotone(rows_with_v({1.0, 2.0}, 0.1), 1e-3).size(), 1u);
  EXPECT_TRUE(check_monotone(rows_with_v({0.0, 0.0, 0.0}, 0.1), 1e-3).empty());
  EXPECT_TRUE(check_monotone(rows_with_v({1.0, 1.0 + 5e-5}, 0.1), 1e-3, 10.0).empty());
  EXPECT_EQ(check_monotone(rows_with_v({1.0, 1.0 + 2e-3}, 0.1), 1e-3, 10.0).size(), 1u);
}

TEST(Diagnostics, TwoPointRunCertificates) {
  const FlowResult<double> r = two_point_run();
  ASSERT_EQ(r.stop, StopReason::converged);
  const Problem<double> p = two_point_problem();
  EXPECT_TRUE(check_monotone(r.trace, r.trace.step_size).empty());
  EXPECT_LE(consensus_residual(r.final_state, p), 1e-3);

  const PassivityLedger led = passivity_ledger(r.trace, p);
  EXPECT_LE(led.h2_gap, 1e-3 * (1 + std::abs(led.h2_delta_storage)));
  EXPECT_LE(led.h3_gap, 1e-3 * (1 + std::abs(led.h3_delta_storage)));
  EXPECT_LE(led.h2_max_switch_free_gap, 1e-12);
  EXPECT_GT(led.switch_free_intervals, 0u);
  EXPECT_LE(led.h1_osp_surplus, 0.0);
  EXPECT_EQ(led.intervals, r.trace.snapshots.size() - 1);

  const CertificateReport rep = certify(r.trace, p, true);
  EXPECT_TRUE(rep.passed());
  EXPECT_DOUBLE_EQ(rep.gain_bound, 2.0 * lambda2(p.graph()));
  EXPECT_EQ(rep.V, rep.V_H1 + rep.V_H2 + rep.V_H3);
}

TEST(Diagnostics, FixedPointTraceHasZeroGaps) {
  const Problem<double> p = two_point_problem();
  const NetworkState<double> star = two_point_optimum(p);
  FlowConfig cfg;
  cfg.record_snapshots = true;
  cfg.record_every = 10;
  cfg.stop_tol = 1e-300;
  cfg.max_steps = 100;
  const FlowResult<double> r = run_flow(p, cfg, star);
  const PassivityLedger led = passivity_ledger(r.trace, p);
  EXPECT_LE(std::abs(led.h1_gap), 1e-20);
  EXPECT_LE(std::abs(led.h2_gap), 1e-20);
  EXPECT_LE(std::abs(led.h3_gap), 1e-20);
  EXPECT_TRUE(check_monotone(r.trace, cfg.step_size).empty());
}

TEST(Diagnostics, LedgerNeedsSnapshots) {
  FlowConfig cfg;
  cfg.max_steps = 10;
  const FlowResult<double> r = run_flow(two_point_problem(), cfg);
  EXPECT_THROW(passivity_ledger(r.trace, two_point_problem()), MissingSnapshots);
  const CertificateReport rep = certify(r.trace, two_point_problem(), false);
  EXPECT_FALSE(rep.passivity.has_value());
}

TEST(Diagnostics, StoragesNonnegative) {
  const Dataset ds = gen_synthetic({3, 2, 1.0, 6});
  const Problem<double> p(ds, partition(ds, 3, PartitionStrategy::round_robin), Graph::ring(3),
                          1.0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const StorageBreakdown st = storages(dsvm::testing::random_state(p, rng, 3.0), p);
    EXPECT_GE(st.V_H1, 0.0);
    EXPECT_GE(st.V_H2, 0.0);
    EXPECT_GE(st.V_H3, 0.0);
  }
}

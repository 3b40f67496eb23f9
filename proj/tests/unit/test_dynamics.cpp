#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "dsvm/dynamics.hpp"
#include "dsvm/oracle.hpp"
#include "test_support.hpp"

using namespace dsvm;
using dsvm::testing::single_sample_problem;
using dsvm::testing::two_point_problem;

TEST(Dynamics, PositiveProjection) {
  EXPECT_EQ(positive_projection(0.0, -3.0), 0.0);
  EXPECT_EQ(positive_projection(0.0, 2.0), 2.0);
  EXPECT_EQ(positive_projection(1.5, -3.0), -3.0);
  EXPECT_THROW(positive_projection(-0.1, 1.0), NegativeState);
}

TEST(Dynamics, ZeroStateSingleSample) {
  for (auto sign : {SlackMultiplierSign::minus, SlackMultiplierSign::plus}) {
    const Problem<double> p = single_sample_problem(1.0, 1.0, 1.0, sign);
    const StateDerivative<double> f = vector_field(p.zero_state(), p);
    EXPECT_EQ(f.w(0, 0), 0.0);
    EXPECT_EQ(f.b(0), 0.0);
    EXPECT_EQ(f.xi(0), 0.0);
    EXPECT_EQ(f.theta(0), 1.0);
    EXPECT_EQ(f.mu(0), 0.0);
    EXPECT_EQ(f.alpha(0, 0), 0.0);
    EXPECT_EQ(f.beta(0), 0.0);
  }
}

TEST(Dynamics, ThetaDrivesPrimal) {
  const Problem<double> p = single_sample_problem(1.0, 1.0);
  NetworkState<double> s = p.zero_state();
  s.theta(0) = 1.0;
  const StateDerivative<double> f = vector_field(s, p);
  EXPECT_EQ(f.w(0, 0), 1.0);
  EXPECT_EQ(f.b(0), 1.0);
}

TEST(Dynamics, SlackDriftPerSign) {
  NetworkState<double> s;
  {
    const Problem<double> p = single_sample_problem(1.0, 1.0, 1.0, SlackMultiplierSign::plus);
    s = p.zero_state();
    s.xi(0) = 0.5;
    s.mu(0) = 2.0;
    s.theta(0) = 0.5;
    const StateDerivative<double> f = vector_field(s, p);
    EXPECT_EQ(f.xi(0), -1.0 - 2.0 + 0.5);  // −mC − μ + θ
    EXPECT_EQ(f.mu(0), 0.5);               // ξ
  }
  {
    const Problem<double> p = single_sample_problem(1.0, 1.0, 1.0, SlackMultiplierSign::minus);
    const StateDerivative<double> f = vector_field(s, p);
    EXPECT_EQ(f.xi(0), -1.0 + 2.0 + 0.5);  // −mC + μ + θ
    EXPECT_EQ(f.mu(0), -0.5);              // −ξ
  }
}

TEST(Dynamics, RejectsNegativeAndMisshapenStates) {
  const Problem<double> p = two_point_problem();
  NetworkState<double> s = p.zero_state();
  s.mu(1) = -1e-300;
  EXPECT_THROW(vector_field(s, p), NegativeState);
  EXPECT_THROW(vector_field(NetworkState<double>(1, 3, 2), p), ShapeMismatch);
}

TEST(Dynamics, EmbeddedOptimumIsFixedPoint) {
  const Problem<double> p = two_point_problem();
  const CentralSolution sol = solve_consensus_reference(dsvm::testing::two_point_dataset(), 10.0, 2);
  EXPECT_LE(vector_field(embed_consensus(sol, p), p).inf_norm(), 1e-6);
}

TEST(Dynamics, ConsensusDualRatesVanishAtConsensus) {
  const Dataset ds = gen_synthetic({2, 3, 2.0, 4});
  const Problem<double> p(ds, partition(ds, 4, PartitionStrategy::contiguous),
                          Graph::complete(4), 1.0);
  std::mt19937_64 rng(1);
  NetworkState<double> s = dsvm::testing::random_state(p, rng);
  for (Index j = 1; j < 4; ++j) {
    s.w.col(j) = s.w.col(0);
    s.b(j) = s.b(0);
  }
  const StateDerivative<double> f = vector_field(s, p);
  EXPECT_EQ(f.alpha, Eigen::MatrixXd::Zero(3, 4));
  EXPECT_EQ(f.beta, Eigen::VectorXd::Zero(4));
}

TEST(Dynamics, AlphaRateIsLaplacianOfW) {
  const Dataset ds = gen_synthetic({3, 2, 2.0, 8});
  const Problem<double> p(ds, partition(ds, 3, PartitionStrategy::round_robin), Graph::path(3),
                          1.0);
  std::mt19937_64 rng(5);
  const NetworkState<double> s = dsvm::testing::random_state(p, rng);
  const StateDerivative<double> f = vector_field(s, p);
  EXPECT_EQ(f.alpha, laplacian_apply(p.graph(), s.w));
  EXPECT_EQ(f.beta, laplacian_apply(p.graph(), s.b, 1));
}

TEST(Dynamics, SwitchSetExamples) {
  const Problem<double> p = single_sample_problem(1.0, 1.0);
  NetworkState<double> s = p.zero_state();
  // h = 1 > 0: θ projection inactive; ξ = θ = μ = 0 puts the sample in ρ.
  SwitchSignals sw = active_switch_sets(s, p);
  EXPECT_TRUE(sw.sigma[0].empty());
  EXPECT_EQ(sw.rho[0], (std::vector<Index>{0}));

  s.w(0, 0) = 1.5;  // h = −0.5
  sw = active_switch_sets(s, p);
  EXPECT_EQ(sw.sigma[0], (std::vector<Index>{0}));
}

TEST(Dynamics, IotaFollowsSign) {
  // ξ > 0, μ = 0: with μ̇ = ξ the projection is inactive; with μ̇ = −ξ it is.
  NetworkState<double> s;
  {
    const Problem<double> plus = single_sample_problem(1.0, 1.0, 1.0, SlackMultiplierSign::plus);
    s = plus.zero_state();
    s.xi(0) = 0.3;
    EXPECT_TRUE(active_switch_sets(s, plus).iota[0].empty());
  }
  const Problem<double> minus = single_sample_problem(1.0, 1.0, 1.0, SlackMultiplierSign::minus);
  EXPECT_EQ(active_switch_sets(s, minus).iota[0], (std::vector<Index>{0}));
}

TEST(Dynamics, ProjectionMatchesSwitchSets) {
  const Dataset ds = gen_synthetic({3, 2, 1.0, 21});
  std::mt19937_64 rng(77);
  for (auto sign : {SlackMultiplierSign::minus, SlackMultiplierSign::plus}) {
    const Problem<double> p(ds, partition(ds, 3, PartitionStrategy::round_robin),
                            Graph::complete(3), 0.5, sign);
    for (int t = 0; t < 1000; ++t) {
      NetworkState<double> s = dsvm::testing::random_state(p, rng, 2.0);
      for (auto* v : {&s.xi, &s.theta, &s.mu})
        for (Index k = 0; k < v->size(); ++k)
          if (uniform01(rng) < 0.4) (*v)(k) = 0.0;
      const StateDerivative<double> raw = raw_drift(s, p);
      const StateDerivative<double> f = vector_field(s, p);
      const SwitchSignals sw = active_switch_sets(s, p);
      for (Index j = 0; j < p.nodes(); ++j) {
        const auto [first, last] = p.sample_range(j);
        auto in = [](const std::vector<Index>& set, Index i) {
          return std::find(set.begin(), set.end(), i) != set.end();
        };
        for (Index k = first; k < last; ++k) {
          const Index i = k - first;
          if (in(sw.sigma[j], i)) {
            EXPECT_EQ(f.theta(k), 0.0);
            EXPECT_LE(raw.theta(k), 0.0);
          } else {
            EXPECT_EQ(f.theta(k), raw.theta(k));
          }
          if (in(sw.iota[j], i)) EXPECT_EQ(f.mu(k), 0.0); else EXPECT_EQ(f.mu(k), raw.mu(k));
          if (in(sw.rho[j], i)) EXPECT_EQ(f.xi(k), 0.0); else EXPECT_EQ(f.xi(k), raw.xi(k));
        }
      }
    }
  }
}

TEST(Dynamics, FieldIsDeterministicAndScalarGeneric) {
  const Dataset ds = gen_synthetic({2, 2, 3.0, 3});
  const Problem<double> p(ds, partition(ds, 2, PartitionStrategy::round_robin), Graph::path(2),
                          1.0);
  std::mt19937_64 rng(9);
  const NetworkState<double> s = dsvm::testing::random_state(p, rng);
  EXPECT_TRUE(vector_field(s, p) == vector_field(s, p));

  const Problem<long double> pl(ds, partition(ds, 2, PartitionStrategy::round_robin),
                                Graph::path(2), 1.0);
  const StateDerivative<long double> fl = vector_field(s.cast<long double>(), pl);
  StateDerivative<double> back;
  back.assign_cast(fl);
  EXPECT_LE((back.flatten() - vector_field(s, p).flatten()).lpNorm<Eigen::Infinity>(), 1e-14);
}

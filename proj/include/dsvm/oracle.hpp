#pragma once

#include <Eigen/Core>

#include "dsvm/data.hpp"
#include "dsvm/errors.hpp"
#include "dsvm/problem.hpp"
#include "dsvm/state.hpp"

namespace dsvm {

/// Optimizer of  min (r/2)‖w‖² + P·Σξ_i  s.t.  y_i(wᵀx_i + b) ≥ 1 − ξ_i, ξ ≥ 0,
/// with its constraint multipliers θ (0 ≤ θ ≤ P).
struct CentralSolution {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd xi;
  Eigen::VectorXd theta;
  double objective = 0.0;

  double regularizer = 1.0;  // r
  double penalty = 0.0;      // P
  /// True when the optimal b is not unique (the optimal w always is).
  bool b_degenerate = false;
  /// Largest KKT violation of the returned point.
  double certificate = 0.0;
};

struct OracleOptions {
  Eigen::Index max_samples = 12;
  double feasibility_tol = 1e-9;
};

/// Exact solver by active-set enumeration: every sample is assigned to
/// "margin inactive" (θ=0), "on the margin" (θ free), or "slack" (θ=P); each
/// assignment's linear KKT system is solved and the candidates that satisfy
/// all sign and feasibility conditions are kept. The minimum objective wins;
/// ties go to the lexicographically smallest (‖w‖, b).
///
/// Throws OracleScaleExceeded above max_samples, InternalError if no
/// assignment yields a KKT point.
CentralSolution solve_soft_margin(const Dataset& dataset, double regularizer, double penalty,
                                  const OracleOptions& opts = {});

/// The centralized problem  min ½‖w‖² + mC·Σξ.
CentralSolution solve_centralized(const Dataset& dataset, double C, Eigen::Index m,
                                  const OracleOptions& opts = {});

/// The distributed problem restricted to consensus (w_j = w, b_j = b), which
/// reads  min (m/2)‖w‖² + mC·Σξ. Its multipliers are those of the network
/// problem, so this is the reference the flow is compared against.
CentralSolution solve_consensus_reference(const Dataset& dataset, double C, Eigen::Index m,
                                          const OracleOptions& opts = {});

/// Largest violation of stationarity, feasibility, multiplier bounds and
/// complementary slackness for `sol` on `dataset`.
double oracle_certificate(const CentralSolution& sol, const Dataset& dataset);

/// Network state at the reference optimum: (w*, b*) on every node, ξ* and θ*
/// on the owning samples, μ* = mC − θ*, and α, β from the least-squares
/// solution of the per-node stationarity equations.
///
/// Throws EmbedFailure if the solution does not belong to this problem's
/// consensus form or the α/β system leaves a residual above 1e-6.
NetworkState<double> embed_consensus(const CentralSolution& sol, const Problem<double>& problem);

}  // namespace dsvm

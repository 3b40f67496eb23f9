#include "dsvm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dsvm {

namespace {

enum class Role : int { inactive = 0, margin = 1, slack = 2 };

struct Candidate {
  Eigen::VectorXd w;
  double b = 0.0;
  Eigen::VectorXd xi;
  Eigen::VectorXd theta;
  double objective = 0.0;
};

// Solves the KKT system of one role assignment; nullopt when the system is
// singular or the solution violates a sign or feasibility condition.
std::optional<Candidate> solve_assignment(const Dataset& ds, const std::vector<Role>& roles,
                                          double r, double P, double tol) {
  const Eigen::Index n = ds.size();
  const Eigen::Index d = ds.feature_dim();
  std::vector<Eigen::Index> margin;
  for (Eigen::Index i = 0; i < n; ++i)
    if (roles[i] == Role::margin) margin.push_back(i);
  // Without margin samples b appears in no equation.
  if (margin.empty()) return std::nullopt;

  const Eigen::Index nb = static_cast<Eigen::Index>(margin.size());
  const Eigen::Index size = d + 1 + nb;
  // Unknowns: (w, b, θ_margin).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);

  A.topLeftCorner(d, d).diagonal().setConstant(r);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const Eigen::Index i = margin[k];
    A.block(0, d + 1 + k, d, 1) = -ds.labels(i) * ds.features.col(i);
    A(d, d + 1 + k) = ds.labels(i);
    A.block(d + 1 + k, 0, 1, d) = ds.labels(i) * ds.features.col(i).transpose();
    A(d + 1 + k, d) = ds.labels(i);
    rhs(d + 1 + k) = 1.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (roles[i] != Role::slack) continue;
    rhs.head(d) += P * ds.labels(i) * ds.features.col(i);
    rhs(d) -= P * ds.labels(i);
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd z = lu.solve(rhs);
  if (!z.allFinite()) return std::nullopt;

  Candidate c;
  c.w = z.head(d);
  c.b = z(d);
  c.theta = Eigen::VectorXd::Zero(n);
  c.xi = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < nb; ++k) {
    const double th = z(d + 1 + k);
    if (th < -tol || th > P + tol) return std::nullopt;
    c.theta(margin[k]) = std::clamp(th, 0.0, P);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double yf = ds.labels(i) * (c.w.dot(ds.features.col(i)) + c.b);
    switch (roles[i]) {
      case Role::inactive:
        if (yf < 1.0 - tol) return std::nullopt;
        break;
      case Role::margin:
        break;
      case Role::slack:
        if (yf > 1.0 + tol) return std::nullopt;
        c.theta(i) = P;
        c.xi(i) = std::max(0.0, 1.0 - yf);
        break;
    }
  }
  c.objective = 0.5 * r * c.w.squaredNorm() + P * c.xi.sum();
  return c;
}

bool better(const Candidate& a, const Candidate& best) {
  const double scale = 1e-12 * (1.0 + std::abs(best.objective));
  if (a.objective < best.objective - scale) return true;
  if (a.objective > best.objective + scale) return false;
  const double na = a.w.norm(), nb = best.w.norm();
  if (na < nb - 1e-12 * (1.0 + nb)) return true;
  if (na > nb + 1e-12 * (1.0 + nb)) return false;
  return a.b < best.b - 1e-12 * (1.0 + std::abs(best.b));
}

// With w fixed, the objective in b is P·Σ max(0, 1 − y(wᵀx + b)), piecewise
// linear with integer one-sided slopes (in units of P). The optimum is
// degenerate when one of them is zero.
bool b_is_degenerate(const Dataset& ds, const Eigen::VectorXd& w, double b, double tol) {
  int right = 0, left = 0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const int y = ds.labels(i) > 0 ? 1 : -1;
    const double slack = 1.0 - y * (w.dot(ds.features.col(i)) + b);
    if (slack > tol) {
      right -= y;
      left -= y;
    } else if (slack >= -tol) {
      right += std::max(0, -y);
      left += std::min(0, -y);
    }
  }
  return right == 0 || left == 0;
}

}  // namespace

CentralSolution solve_soft_margin(const Dataset& dataset, double regularizer, double penalty,
                                  const OracleOptions& opts) {
  const Eigen::Index n = dataset.size();
  if (n < 1) throw InvalidParam("oracle: empty dataset");
  if (n > opts.max_samples) {
    throw OracleScaleExceeded("oracle: " + std::to_string(n) + " samples exceed the cap of " +
                              std::to_string(opts.max_samples));
  }
  if (!(regularizer > 0.0) || !(penalty > 0.0)) {
    throw InvalidParam("oracle: regularizer and penalty must be > 0");
  }

  std::optional<Candidate> best;
  std::vector<Role> roles(n, Role::inactive);
  // Odometer over the 3^n role assignments.
  while (true) {
    if (auto c = solve_assignment(dataset, roles, regularizer, penalty, opts.feasibility_tol)) {
      if (!best || better(*c, *best)) best = std::move(c);
    }
    Eigen::Index k = 0;
    while (k < n && roles[k] == Role::slack) roles[k++] = Role::inactive;
    if (k == n) break;
    roles[k] = static_cast<Role>(static_cast<int>(roles[k]) + 1);
  }
  if (!best) throw InternalError("oracle: no role assignment produced a KKT point");

  CentralSolution sol;
  sol.w = best->w;
  sol.b = best->b;
  sol.xi = best->xi;
  sol.theta = best->theta;
  sol.objective = best->objective;
  sol.regularizer = regularizer;
  sol.penalty = penalty;
  sol.b_degenerate = b_is_degenerate(dataset, sol.w, sol.b, 1e-9);
  sol.certificate = oracle_certificate(sol, dataset);
  return sol;
}

CentralSolution solve_centralized(const Dataset& dataset, double C, Eigen::Index m,
                                  const OracleOptions& opts) {
  return solve_soft_margin(dataset, 1.0, static_cast<double>(m) * C, opts);
}

CentralSolution solve_consensus_reference(const Dataset& dataset, double C, Eigen::Index m,
                                          const OracleOptions& opts) {
  const double md = static_cast<double>(m);
  return solve_soft_margin(dataset, md, md * C, opts);
}

double oracle_certificate(const CentralSolution& sol, const Dataset& ds) {
  const double P = sol.penalty;
  Eigen::VectorXd grad_w = sol.regularizer * sol.w;
  double grad_b = 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    const double y = ds.labels(i);
    grad_w -= sol.theta(i) * y * ds.features.col(i);
    grad_b -= sol.theta(i) * y;
    const double g = y * (sol.w.dot(ds.features.col(i)) + sol.b) - 1.0 + sol.xi(i);
    worst = std::max({worst, -g, -sol.xi(i), -sol.theta(i), sol.theta(i) - P,
                      std::abs(sol.theta(i) * g), std::abs((P - sol.theta(i)) * sol.xi(i))});
  }
  worst = std::max(worst, std::abs(grad_b));
  if (grad_w.size()) worst = std::max(worst, grad_w.cwiseAbs().maxCoeff());
  return worst;
}

NetworkState<double> embed_consensus(const CentralSolution& sol, const Problem<double>& p) {
  const double P = p.penalty();
  const double m = static_cast<double>(p.nodes());
  if (sol.theta.size() != p.samples() || sol.w.size() != p.dim()) {
    throw EmbedFailure("embed: solution shape does not match the problem");
  }
  if (std::abs(sol.penalty - P) > 1e-12 * P) {
    throw EmbedFailure("embed: solution slack weight " + std::to_string(sol.penalty) +
                       " differs from the problem's mC = " + std::to_string(P));
  }
  if (std::abs(sol.regularizer - m) > 1e-12 * m) {
    throw EmbedFailure("embed: solution is not in the consensus form of this network");
  }

  NetworkState<double> s = p.zero_state();
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    s.w.col(j) = sol.w;
    s.b(j) = sol.b;
  }
  for (Eigen::Index k = 0; k < p.samples(); ++k) {
    const Eigen::Index src = p.source_index(k);
    s.xi(k) = std::max(0.0, sol.xi(src));
    s.theta(k) = std::max(0.0, sol.theta(src));
    const double mu = P - sol.theta(src);
    if (mu < -1e-9) throw EmbedFailure("embed: θ exceeds mC, μ* would be negative");
    s.mu(k) = std::max(0.0, mu);
  }

  // (L⊗I)α = −(w + ζ) and Lβ = −η, minimum-norm least squares.
  const Eigen::MatrixXd lap = p.graph().laplacian<double>();
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(lap);
  const Eigen::MatrixXd rhs_alpha = -(s.w + zeta(s.theta, p));
  const Eigen::VectorXd rhs_beta = -eta(s.theta, p);
  s.alpha = cod.solve(rhs_alpha.transpose()).transpose();
  s.beta = cod.solve(rhs_beta);

  const double residual =
      std::max((lap * s.alpha.transpose() - rhs_alpha.transpose()).cwiseAbs().maxCoeff(),
               (lap * s.beta - rhs_beta).cwiseAbs().maxCoeff());
  if (!(residual <= 1e-6)) {
    throw EmbedFailure("embed: consensus multiplier system residual " + std::to_string(residual) +
                       " exceeds 1e-6");
  }
  return s;
}

}  // namespace dsvm

#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsvm/data.hpp"
#include "dsvm/errors.hpp"
#include "dsvm/graph.hpp"
#include "dsvm/state.hpp"

namespace dsvm {

/// Sign of the μ·ξ coupling term in the Lagrangian. `minus` (−μξ) is the
/// standard soft-margin form whose saddle points are the SVM optimum;
/// `plus` (+μξ) drives every slack to zero and yields the hard-margin point.
enum class SlackMultiplierSign { minus, plus };

inline SlackMultiplierSign parse_slack_multiplier_sign(std::string_view name) {
  if (name == "minus") return SlackMultiplierSign::minus;
  if (name == "plus") return SlackMultiplierSign::plus;
  throw InvalidParam("slack_multiplier_sign: expected 'minus' or 'plus', got '" +
                     std::string(name) + "'");
}

inline std::string_view to_string(SlackMultiplierSign sign) {
  return sign == SlackMultiplierSign::minus ? "minus" : "plus";
}

/// Distributed soft-margin SVM instance: partitioned samples on a graph,
/// with slack weight mC where m is the node count.
template <typename Scalar>
class Problem {
 public:
  Problem(const Dataset& dataset, const NodePartition& part, Graph graph, double C,
          SlackMultiplierSign sign = SlackMultiplierSign::minus)
      : graph_(std::move(graph)), C_(C), sign_(sign) {
    if (part.node_count() != graph_.node_count()) {
      throw ShapeMismatch("partition has " + std::to_string(part.node_count()) +
                          " nodes but graph has " + std::to_string(graph_.node_count()));
    }
    if (!(C > 0.0)) throw InvalidParam("C must be > 0");
    Eigen::Index total = 0;
    for (const auto& m : part.members) {
      if (m.empty()) throw TooFewSamples("every node needs at least one sample");
      total += static_cast<Eigen::Index>(m.size());
    }
    features_.resize(dataset.feature_dim(), total);
    labels_.resize(total);
    offsets_.assign(1, 0);
    source_.reserve(total);
    Eigen::Index k = 0;
    for (const auto& members : part.members) {
      for (Eigen::Index i : members) {
        if (i < 0 || i >= dataset.size()) throw ShapeMismatch("partition index out of range");
        features_.col(k) = dataset.features.col(i).template cast<Scalar>();
        labels_(k) = Scalar(dataset.labels(i));
        source_.push_back(i);
        ++k;
      }
      offsets_.push_back(k);
    }
  }

  const Graph& graph() const { return graph_; }
  Eigen::Index nodes() const { return graph_.node_count(); }
  Eigen::Index dim() const { return features_.rows(); }
  Eigen::Index samples() const { return features_.cols(); }
  double C() const { return C_; }
  /// Slack weight mC, with m bound to the node count.
  Scalar penalty() const { return Scalar(static_cast<double>(nodes()) * C_); }
  SlackMultiplierSign slack_sign() const { return sign_; }
  /// ±1 coefficient of μ·ξ in the Lagrangian.
  Scalar mu_coupling() const { return Scalar(sign_ == SlackMultiplierSign::minus ? -1 : 1); }

  /// Flattened sample indices [first, last) owned by node j.
  std::pair<Eigen::Index, Eigen::Index> sample_range(Eigen::Index j) const {
    return {offsets_[j], offsets_[j + 1]};
  }
  Eigen::Index node_of(Eigen::Index k) const {
    return static_cast<Eigen::Index>(
        std::upper_bound(offsets_.begin(), offsets_.end(), k) - offsets_.begin() - 1);
  }
  auto x(Eigen::Index k) const { return features_.col(k); }
  Scalar y(Eigen::Index k) const { return labels_(k); }
  const MatrixX<Scalar>& features() const { return features_; }
  const VectorX<Scalar>& labels() const { return labels_; }
  /// Dataset row of flattened sample k.
  Eigen::Index source_index(Eigen::Index k) const { return source_[k]; }

  NetworkState<Scalar> zero_state() const {
    return NetworkState<Scalar>(dim(), nodes(), samples());
  }

  void check_shape(const PrimalDualFields<Scalar>& s) const {
    if (s.w.rows() != dim() || s.w.cols() != nodes() || s.b.size() != nodes() ||
        s.xi.size() != samples() || s.theta.size() != samples() || s.mu.size() != samples() ||
        s.alpha.rows() != dim() || s.alpha.cols() != nodes() || s.beta.size() != nodes()) {
      throw ShapeMismatch("state shape does not match the problem");
    }
  }

 private:
  Graph graph_;
  double C_;
  SlackMultiplierSign sign_;
  MatrixX<Scalar> features_;
  VectorX<Scalar> labels_;
  std::vector<Eigen::Index> offsets_;
  std::vector<Eigen::Index> source_;
};

/// h = 1 − ξ − y(wᵀx + b); h ≤ 0 means the margin constraint holds.
template <typename Scalar, typename DerivedW, typename DerivedX>
Scalar hinge_constraint(Scalar xi, const Eigen::MatrixBase<DerivedW>& w, Scalar b,
                        const Eigen::MatrixBase<DerivedX>& x, Scalar y) {
  return Scalar(1) - xi - y * (w.dot(x) + b);
}

template <typename Scalar>
Scalar hinge_at(const NetworkState<Scalar>& s, const Problem<Scalar>& p, Eigen::Index k) {
  const Eigen::Index j = p.node_of(k);
  return hinge_constraint<Scalar>(s.xi(k), s.w.col(j), s.b(j), p.x(k), p.y(k));
}

/// ζ_j = Σ_i θ_ji(−y_ji x_ji), one column per node.
template <typename Scalar>
MatrixX<Scalar> zeta(const VectorX<Scalar>& theta, const Problem<Scalar>& p) {
  MatrixX<Scalar> z = MatrixX<Scalar>::Zero(p.dim(), p.nodes());
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    const auto [first, last] = p.sample_range(j);
    for (Eigen::Index k = first; k < last; ++k) z.col(j) -= theta(k) * p.y(k) * p.x(k);
  }
  return z;
}

/// η_j = Σ_i θ_ji(−y_ji).
template <typename Scalar>
VectorX<Scalar> eta(const VectorX<Scalar>& theta, const Problem<Scalar>& p) {
  VectorX<Scalar> e = VectorX<Scalar>::Zero(p.nodes());
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    const auto [first, last] = p.sample_range(j);
    for (Eigen::Index k = first; k < last; ++k) e(j) -= theta(k) * p.y(k);
  }
  return e;
}

/// ½Σ_j‖w_j‖² + mC·Σ_ji ξ_ji
template <typename Scalar>
Scalar objective_value(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  return Scalar(0.5) * s.w.squaredNorm() + p.penalty() * s.xi.sum();
}

/// Lagrangian including the ½wᵀLw + ½bᵀLb augmentation:
///   ½‖w‖² + mCΣξ + αᵀLw + βᵀLb + Σθh ± Σμξ + ½wᵀLw + ½bᵀLb
template <typename Scalar>
Scalar lagrangian_value(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  const MatrixX<Scalar> lw = laplacian_apply(p.graph(), s.w);
  const VectorX<Scalar> lb = laplacian_apply(p.graph(), s.b, 1);
  Scalar value = Scalar(0.5) * s.w.squaredNorm() + p.penalty() * s.xi.sum();
  value += s.alpha.cwiseProduct(lw).sum() + s.beta.dot(lb);
  for (Eigen::Index k = 0; k < p.samples(); ++k) value += s.theta(k) * hinge_at(s, p, k);
  value += p.mu_coupling() * s.mu.dot(s.xi);
  value += Scalar(0.5) * s.w.cwiseProduct(lw).sum() + Scalar(0.5) * s.b.dot(lb);
  return value;
}

/// ∇L with respect to every variable, differentiated from lagrangian_value.
template <typename Scalar>
LagrangianGradient<Scalar> lagrangian_gradient(const NetworkState<Scalar>& s,
                                               const Problem<Scalar>& p) {
  p.check_shape(s);
  const Graph& g = p.graph();
  LagrangianGradient<Scalar> grad(p.dim(), p.nodes(), p.samples());
  grad.w = s.w + laplacian_apply(g, s.alpha) + zeta(s.theta, p) + laplacian_apply(g, s.w);
  grad.b = laplacian_apply(g, s.beta, 1) + eta(s.theta, p) + laplacian_apply(g, s.b, 1);
  for (Eigen::Index k = 0; k < p.samples(); ++k) {
    grad.xi(k) = p.penalty() - s.theta(k) + p.mu_coupling() * s.mu(k);
    grad.theta(k) = hinge_at(s, p, k);
    grad.mu(k) = p.mu_coupling() * s.xi(k);
  }
  grad.alpha = laplacian_apply(g, s.w);
  grad.beta = laplacian_apply(g, s.b, 1);
  return grad;
}

struct KktReport {
  double stationarity_residual = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double complementarity = 0.0;
  double consensus = 0.0;

  double max_residual() const {
    return std::max({stationarity_residual, primal_infeasibility, dual_infeasibility,
                     complementarity, consensus});
  }
  bool satisfied(double tol) const { return max_residual() <= tol; }
};

/// Residuals of the KKT system at a network state.
///
/// Stationarity uses the projected gradient: w, b, α, β contribute |∂L|;
/// the minimized slack ξ at 0 contributes max(0, −∂L/∂ξ); the maximized
/// multipliers θ, μ at 0 contribute max(0, ∂L). α and β are sign-free.
template <typename Scalar>
KktReport kkt_residuals(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  const LagrangianGradient<Scalar> grad = lagrangian_gradient(s, p);
  using std::abs;
  using std::max;
  Scalar stat(0), primal(0), dual(0), comp(0), cons(0);
  auto amax = [](const auto& m) { return m.size() ? Scalar(m.cwiseAbs().maxCoeff()) : Scalar(0); };
  stat = max({amax(grad.w), amax(grad.b), amax(grad.alpha), amax(grad.beta)});
  for (Eigen::Index k = 0; k < p.samples(); ++k) {
    const Scalar gxi = s.xi(k) > 0 ? abs(grad.xi(k)) : max(Scalar(0), -grad.xi(k));
    const Scalar gth = s.theta(k) > 0 ? abs(grad.theta(k)) : max(Scalar(0), grad.theta(k));
    const Scalar gmu = s.mu(k) > 0 ? abs(grad.mu(k)) : max(Scalar(0), grad.mu(k));
    stat = max({stat, gxi, gth, gmu});

    const Scalar h = grad.theta(k);
    primal = max({primal, max(h, Scalar(0)), max(-s.xi(k), Scalar(0))});
    dual = max({dual, max(-s.theta(k), Scalar(0)), max(-s.mu(k), Scalar(0))});
    comp = max({comp, abs(s.theta(k) * h), abs(s.xi(k) * s.mu(k))});
  }
  for (const auto& [a, b] : p.graph().edges()) {
    cons = max({cons, Scalar((s.w.col(a) - s.w.col(b)).cwiseAbs().maxCoeff()),
                abs(s.b(a) - s.b(b))});
  }
  return {static_cast<double>(stat), static_cast<double>(primal), static_cast<double>(dual),
          static_cast<double>(comp), static_cast<double>(cons)};
}

}  // namespace dsvm

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dsvm/errors.hpp"
#include "dsvm/problem.hpp"
#include "dsvm/state.hpp"

namespace dsvm {

/// [f]⁺_x: the drift of a variable held in the nonnegative orthant.
template <typename Scalar>
Scalar positive_projection(Scalar x, Scalar f) {
  if (x < Scalar(0)) throw NegativeState("projected variable is negative");
  if (x > Scalar(0)) return f;
  return std::max(Scalar(0), f);
}

template <typename Scalar>
void require_nonnegative(const NetworkState<Scalar>& s) {
  auto neg = [](const VectorX<Scalar>& v) { return v.size() && v.minCoeff() < Scalar(0); };
  if (neg(s.xi) || neg(s.theta) || neg(s.mu)) {
    throw NegativeState("ξ, θ and μ must be nonnegative");
  }
}

namespace detail {

// Unprojected right-hand side, node by node, neighbors and samples in
// ascending order.
template <typename Scalar>
StateDerivative<Scalar> drift(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  const Graph& g = p.graph();
  const Scalar mc = p.penalty();
  const Scalar sgn = p.mu_coupling();
  StateDerivative<Scalar> d(p.dim(), p.nodes(), p.samples());
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    VectorX<Scalar> dw = -s.w.col(j);
    Scalar db(0);
    VectorX<Scalar> da = VectorX<Scalar>::Zero(p.dim());
    Scalar dbeta(0);

    const auto [first, last] = p.sample_range(j);
    for (Eigen::Index k = first; k < last; ++k) {
      dw += s.theta(k) * p.y(k) * p.x(k);  // −θ(−y x)
      db += s.theta(k) * p.y(k);           // −θ(−y)
    }
    for (Eigen::Index l : g.neighbors(j)) {
      dw -= (s.alpha.col(j) - s.alpha.col(l)) + (s.w.col(j) - s.w.col(l));
      db -= (s.beta(j) - s.beta(l)) + (s.b(j) - s.b(l));
      da += s.w.col(j) - s.w.col(l);
      dbeta += s.b(j) - s.b(l);
    }
    d.w.col(j) = dw;
    d.b(j) = db;
    d.alpha.col(j) = da;
    d.beta(j) = dbeta;

    for (Eigen::Index k = first; k < last; ++k) {
      d.xi(k) = -mc - sgn * s.mu(k) + s.theta(k);
      d.theta(k) = hinge_constraint<Scalar>(s.xi(k), s.w.col(j), s.b(j), p.x(k), p.y(k));
      d.mu(k) = sgn * s.xi(k);
    }
  }
  return d;
}

}  // namespace detail

/// Right-hand side before projection; the RK4 stages use this and rely on
/// clamping to stay in the orthant.
template <typename Scalar>
StateDerivative<Scalar> raw_drift(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  return detail::drift(s, p);
}

/// Projected primal-dual vector field:
///   ẇ_j = −w_j − ζ_j − Σ_{l∈N_j}(α_j−α_l) − Σ_{l∈N_j}(w_j−w_l)
///   ḃ_j = −η_j − Σ_{l∈N_j}(β_j−β_l) − Σ_{l∈N_j}(b_j−b_l)
///   ξ̇ = [−mC − sμ + θ]⁺_ξ,  θ̇ = [h]⁺_θ,  μ̇ = [sξ]⁺_μ
/// with s = Problem::mu_coupling() (−1 by default).
///   α̇_j = Σ_{l∈N_j}(w_j−w_l),  β̇_j = Σ_{l∈N_j}(b_j−b_l)
template <typename Scalar>
StateDerivative<Scalar> vector_field(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  require_nonnegative(s);
  StateDerivative<Scalar> d = detail::drift(s, p);
  for (Eigen::Index k = 0; k < p.samples(); ++k) {
    d.xi(k) = positive_projection(s.xi(k), d.xi(k));
    d.theta(k) = positive_projection(s.theta(k), d.theta(k));
    d.mu(k) = positive_projection(s.mu(k), d.mu(k));
  }
  return d;
}

/// Active projection sets per node, as sample indices local to the node.
struct SwitchSignals {
  std::vector<std::vector<Eigen::Index>> sigma;  // θ = 0, h ≤ 0
  std::vector<std::vector<Eigen::Index>> iota;   // μ = 0, sξ ≤ 0
  std::vector<std::vector<Eigen::Index>> rho;    // ξ = 0, −mC − sμ + θ ≤ 0

  friend bool operator==(const SwitchSignals&, const SwitchSignals&) = default;
};

template <typename Scalar>
SwitchSignals active_switch_sets(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  require_nonnegative(s);
  SwitchSignals out;
  out.sigma.resize(p.nodes());
  out.iota.resize(p.nodes());
  out.rho.resize(p.nodes());
  const Scalar mc = p.penalty();
  const Scalar sgn = p.mu_coupling();
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    const auto [first, last] = p.sample_range(j);
    for (Eigen::Index k = first; k < last; ++k) {
      const Eigen::Index i = k - first;
      const Scalar h = hinge_constraint<Scalar>(s.xi(k), s.w.col(j), s.b(j), p.x(k), p.y(k));
      if (s.theta(k) == Scalar(0) && h <= Scalar(0)) out.sigma[j].push_back(i);
      if (s.mu(k) == Scalar(0) && sgn * s.xi(k) <= Scalar(0)) out.iota[j].push_back(i);
      if (s.xi(k) == Scalar(0) && -mc - sgn * s.mu(k) + s.theta(k) <= Scalar(0)) out.rho[j].push_back(i);
    }
  }
  return out;
}

}  // namespace dsvm

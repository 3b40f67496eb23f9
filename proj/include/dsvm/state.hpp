#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

namespace dsvm {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Storage shared by the network state and its time derivative.
///
/// Per-node vector blocks (w, α) are the columns of d×m matrices; per-node
/// scalars (b, β) are length-m vectors; per-sample quantities (ξ, θ, μ) are
/// flattened node-major, node j owning the range given by
/// Problem::sample_range(j).
template <typename Scalar>
struct PrimalDualFields {
  MatrixX<Scalar> w;
  VectorX<Scalar> b;
  VectorX<Scalar> xi;
  VectorX<Scalar> theta;
  VectorX<Scalar> mu;
  MatrixX<Scalar> alpha;
  VectorX<Scalar> beta;

  PrimalDualFields() = default;
  PrimalDualFields(Eigen::Index dim, Eigen::Index nodes, Eigen::Index samples)
      : w(MatrixX<Scalar>::Zero(dim, nodes)),
        b(VectorX<Scalar>::Zero(nodes)),
        xi(VectorX<Scalar>::Zero(samples)),
        theta(VectorX<Scalar>::Zero(samples)),
        mu(VectorX<Scalar>::Zero(samples)),
        alpha(MatrixX<Scalar>::Zero(dim, nodes)),
        beta(VectorX<Scalar>::Zero(nodes)) {}

  Eigen::Index dim() const { return w.rows(); }
  Eigen::Index nodes() const { return w.cols(); }
  Eigen::Index samples() const { return xi.size(); }
  Eigen::Index size() const { return 2 * w.size() + 2 * b.size() + 3 * xi.size(); }

  bool same_shape(const PrimalDualFields& o) const {
    return w.rows() == o.w.rows() && w.cols() == o.w.cols() && b.size() == o.b.size() &&
           xi.size() == o.xi.size() && theta.size() == o.theta.size() &&
           mu.size() == o.mu.size() && alpha.rows() == o.alpha.rows() &&
           alpha.cols() == o.alpha.cols() && beta.size() == o.beta.size();
  }

  Scalar inf_norm() const {
    Scalar n(0);
    auto fold = [&n](const auto& m) {
      if (m.size() > 0) n = std::max<Scalar>(n, m.cwiseAbs().maxCoeff());
    };
    fold(w), fold(b), fold(xi), fold(theta), fold(mu), fold(alpha), fold(beta);
    return n;
  }

  bool all_finite() const {
    return w.allFinite() && b.allFinite() && xi.allFinite() && theta.allFinite() &&
           mu.allFinite() && alpha.allFinite() && beta.allFinite();
  }

  /// this += s·o
  void add_scaled(Scalar s, const PrimalDualFields& o) {
    w += s * o.w;
    b += s * o.b;
    xi += s * o.xi;
    theta += s * o.theta;
    mu += s * o.mu;
    alpha += s * o.alpha;
    beta += s * o.beta;
  }

  /// Stacked view in the fixed order (w, b, ξ, θ, μ, α, β); used for
  /// finite-difference probing and generic norms.
  VectorX<Scalar> flatten() const {
    VectorX<Scalar> v(size());
    Eigen::Index k = 0;
    auto put = [&](const auto& m) {
      v.segment(k, m.size()) = Eigen::Map<const VectorX<Scalar>>(m.data(), m.size());
      k += m.size();
    };
    put(w), put(b), put(xi), put(theta), put(mu), put(alpha), put(beta);
    return v;
  }

  void unflatten(const VectorX<Scalar>& v) {
    Eigen::Index k = 0;
    auto get = [&](auto& m) {
      Eigen::Map<VectorX<Scalar>>(m.data(), m.size()) = v.segment(k, m.size());
      k += m.size();
    };
    get(w), get(b), get(xi), get(theta), get(mu), get(alpha), get(beta);
  }

  template <typename Other>
  void assign_cast(const PrimalDualFields<Other>& o) {
    w = o.w.template cast<Scalar>();
    b = o.b.template cast<Scalar>();
    xi = o.xi.template cast<Scalar>();
    theta = o.theta.template cast<Scalar>();
    mu = o.mu.template cast<Scalar>();
    alpha = o.alpha.template cast<Scalar>();
    beta = o.beta.template cast<Scalar>();
  }

  friend bool operator==(const PrimalDualFields& a, const PrimalDualFields& b) {
    return a.same_shape(b) && a.w == b.w && a.b == b.b && a.xi == b.xi &&
           a.theta == b.theta && a.mu == b.mu && a.alpha == b.alpha && a.beta == b.beta;
  }
};

/// Full primal-dual state (w, b, ξ, θ, μ, α, β). ξ, θ, μ stay ≥ 0.
template <typename Scalar>
struct NetworkState : PrimalDualFields<Scalar> {
  using PrimalDualFields<Scalar>::PrimalDualFields;

  template <typename T>
  NetworkState<T> cast() const {
    NetworkState<T> out;
    out.assign_cast(*this);
    return out;
  }
};

/// Value of the projected vector field; same layout as NetworkState.
template <typename Scalar>
struct StateDerivative : PrimalDualFields<Scalar> {
  using PrimalDualFields<Scalar>::PrimalDualFields;
};

/// Gradient of the Lagrangian with respect to every variable.
template <typename Scalar>
struct LagrangianGradient : PrimalDualFields<Scalar> {
  using PrimalDualFields<Scalar>::PrimalDualFields;
};

}  // namespace dsvm

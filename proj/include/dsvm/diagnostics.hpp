#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dsvm/dynamics.hpp"
#include "dsvm/errors.hpp"
#include "dsvm/graph.hpp"
#include "dsvm/problem.hpp"
#include "dsvm/trace.hpp"

namespace dsvm {

// Krasovskii storages: squared norms of the field, split by subsystem.
//   H1 (primal)            ½‖ẇ‖² + ½‖ḃ‖²
//   H2 (consensus duals)   ½‖α̇‖² + ½‖β̇‖²   with α̇ = (L⊗I)w, β̇ = Lb
//   H3 (slack, multipliers) ½Σ θ̇² + μ̇² + ξ̇² over indices outside the active sets

template <typename Scalar>
Scalar storage_h1_from_field(const StateDerivative<Scalar>& f) {
  return Scalar(0.5) * (f.w.squaredNorm() + f.b.squaredNorm());
}

template <typename Scalar>
Scalar storage_h1(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  return storage_h1_from_field(vector_field(s, p));
}

template <typename Scalar>
Scalar storage_h2(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  const MatrixX<Scalar> alpha_dot = laplacian_apply(p.graph(), s.w);
  const VectorX<Scalar> beta_dot = laplacian_apply(p.graph(), s.b, 1);
  return Scalar(0.5) * (alpha_dot.squaredNorm() + beta_dot.squaredNorm());
}

template <typename Scalar>
Scalar storage_h3_from(const StateDerivative<Scalar>& f, const SwitchSignals& sw,
                       const Problem<Scalar>& p) {
  Scalar acc(0);
  for (Eigen::Index j = 0; j < p.nodes(); ++j) {
    const auto [first, last] = p.sample_range(j);
    auto outside = [](const std::vector<Eigen::Index>& set, Eigen::Index i) {
      return !std::binary_search(set.begin(), set.end(), i);
    };
    for (Eigen::Index k = first; k < last; ++k) {
      const Eigen::Index i = k - first;
      if (outside(sw.sigma[j], i)) acc += f.theta(k) * f.theta(k);
      if (outside(sw.iota[j], i)) acc += f.mu(k) * f.mu(k);
      if (outside(sw.rho[j], i)) acc += f.xi(k) * f.xi(k);
    }
  }
  return Scalar(0.5) * acc;
}

template <typename Scalar>
Scalar storage_h3(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  return storage_h3_from(vector_field(s, p), active_switch_sets(s, p), p);
}

struct StorageBreakdown {
  double V = 0.0;
  double V_H1 = 0.0;
  double V_H2 = 0.0;
  double V_H3 = 0.0;
};

template <typename Scalar>
StorageBreakdown storages(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  const StateDerivative<Scalar> f = vector_field(s, p);
  StorageBreakdown out;
  out.V_H1 = static_cast<double>(storage_h1_from_field(f));
  out.V_H2 = static_cast<double>(storage_h2(s, p));
  out.V_H3 = static_cast<double>(storage_h3_from(f, active_switch_sets(s, p), p));
  out.V = out.V_H1 + out.V_H2 + out.V_H3;
  return out;
}

/// V = V_H1 + V_H2 + V_H3
template <typename Scalar>
Scalar total_lyapunov(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  return storage_h1(s, p) + storage_h2(s, p) + storage_h3(s, p);
}

/// max(‖(L⊗I)w‖∞, ‖Lb‖∞)
template <typename Scalar>
Scalar consensus_residual(const NetworkState<Scalar>& s, const Problem<Scalar>& p) {
  p.check_shape(s);
  const MatrixX<Scalar> lw = laplacian_apply(p.graph(), s.w);
  const VectorX<Scalar> lb = laplacian_apply(p.graph(), s.b, 1);
  Scalar r(0);
  if (lw.size()) r = std::max<Scalar>(r, lw.cwiseAbs().maxCoeff());
  if (lb.size()) r = std::max<Scalar>(r, lb.cwiseAbs().maxCoeff());
  return r;
}

struct LyapunovViolation {
  double t = 0.0;          // later instant of the offending pair
  double delta_V = 0.0;
  double allowance = 0.0;
};

inline constexpr double kDefaultMonotoneAllowance = 10.0;

/// Flags consecutive rows with V(t+Δ) − V(t) > c·h·Δ.
std::vector<LyapunovViolation> check_monotone(const Trace& trace, double step_size,
                                              double c = kDefaultMonotoneAllowance);

/// Storage balance of each subsystem over a snapshot trace.
///
/// Port outputs' rates (ẏ) are sampled from the field at each snapshot and
/// port inputs (u) are differenced between snapshots, so each interval
/// contributes ½(ẏ_k + ẏ_{k+1})ᵀ(u_{k+1} − u_k) to ∫ẏᵀu̇ dt.
struct PassivityLedger {
  double h1_delta_storage = 0.0;
  double h1_port_work = 0.0;
  double h1_gap = 0.0;          // ΔV_H1 − ∫ port power
  double h1_osp_surplus = 0.0;  // ∫(−ẇᵀẇ − ẇᵀLẇ − ḃᵀLḃ) dt, ≤ 0

  double h2_delta_storage = 0.0;
  double h2_port_work = 0.0;
  double h2_gap = 0.0;
  double h2_max_switch_free_gap = 0.0;  // largest |per-interval gap| with no switching
  std::size_t switch_free_intervals = 0;

  double h3_delta_storage = 0.0;
  double h3_port_work = 0.0;
  double h3_gap = 0.0;

  std::size_t intervals = 0;
};

/// Throws MissingSnapshots when fewer than two snapshots are recorded.
PassivityLedger passivity_ledger(const Trace& trace, const Problem<double>& problem);

/// Pass threshold for a storage gap: max(1e-3, 1e-3·|ΔStorage|).
inline double passivity_tolerance(double delta_storage) {
  return std::max(1e-3, 1e-3 * std::abs(delta_storage));
}
inline constexpr double kSwitchFreeH2Tolerance = 1e-6;

struct CertificateReport {
  double V = 0.0;
  double V_H1 = 0.0;
  double V_H2 = 0.0;
  double V_H3 = 0.0;
  std::vector<LyapunovViolation> lyapunov_violations;
  std::optional<PassivityLedger> passivity;
  double consensus_residual = 0.0;
  double lambda2 = 0.0;
  double gain_bound = 0.0;  // γ_H1 = 2·λ2(L)

  bool h1_passive() const;
  bool h2_passive() const;
  bool h3_passive() const;
  bool h2_lossless() const;
  bool passed() const;
};

/// Final-state storages come from the last snapshot when present, otherwise
/// from the last trace row. The ledger runs only when `with_ledger` is set.
CertificateReport certify(const Trace& trace, const Problem<double>& problem, bool with_ledger,
                          double monotone_c = kDefaultMonotoneAllowance);

}  // namespace dsvm

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <type_traits>

#include "dsvm/diagnostics.hpp"
#include "dsvm/dynamics.hpp"
#include "dsvm/errors.hpp"
#include "dsvm/problem.hpp"
#include "dsvm/rng.hpp"
#include "dsvm/trace.hpp"

namespace dsvm {

enum class StepMethod { euler, rk4 };
StepMethod parse_step_method(std::string_view name);
std::string_view to_string(StepMethod method);

struct InitSpec {
  enum class Kind { zeros, seeded_random } kind = Kind::zeros;
  double scale = 1.0;
  std::uint64_t seed = 0;
};

struct FlowConfig {
  double step_size = 1e-3;
  std::int64_t max_steps = 2'000'000;
  double stop_tol = 1e-6;
  std::int64_t record_every = 100;
  StepMethod method = StepMethod::euler;
  InitSpec init;
  bool record_snapshots = false;

  /// Throws InvalidParam naming the offending field.
  void validate() const;
};

enum class StopReason { converged, max_steps };
std::string_view to_string(StopReason reason);

template <typename Scalar>
struct FlowResult {
  NetworkState<Scalar> final_state;
  Trace trace;
  StopReason stop = StopReason::max_steps;
  std::int64_t steps = 0;
  double final_field_norm = 0.0;
};

/// Initial state per `init`: zeros, or w, b, α, β uniform in [−scale, scale]
/// and ξ, θ, μ uniform in [0, scale], drawn in that field order.
template <typename Scalar>
NetworkState<Scalar> initial_state(const Problem<Scalar>& p, const InitSpec& init) {
  NetworkState<Scalar> s = p.zero_state();
  if (init.kind == InitSpec::Kind::zeros) return s;
  std::mt19937_64 rng(init.seed);
  auto fill = [&](auto& m, bool signed_range) {
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      const double u = uniform01(rng);
      m.data()[k] = Scalar(init.scale * (signed_range ? 2.0 * u - 1.0 : u));
    }
  };
  fill(s.w, true), fill(s.b, true), fill(s.xi, false), fill(s.theta, false),
      fill(s.mu, false), fill(s.alpha, true), fill(s.beta, true);
  return s;
}

template <typename Scalar>
void clamp_nonnegative(NetworkState<Scalar>& s) {
  s.xi = s.xi.cwiseMax(Scalar(0));
  s.theta = s.theta.cwiseMax(Scalar(0));
  s.mu = s.mu.cwiseMax(Scalar(0));
}

namespace detail {

template <typename Scalar>
NetworkState<Scalar> advanced(const NetworkState<Scalar>& s, Scalar h,
                              const StateDerivative<Scalar>& d) {
  NetworkState<Scalar> out = s;
  out.add_scaled(h, d);
  clamp_nonnegative(out);
  return out;
}

template <typename Scalar>
NetworkState<Scalar> euler_from_field(const NetworkState<Scalar>& s, Scalar h,
                                      const StateDerivative<Scalar>& field) {
  NetworkState<Scalar> out = advanced(s, h, field);
  if (!out.all_finite()) throw NonFiniteState("non-finite state after Euler step", -1);
  return out;
}

template <typename Scalar>
NetworkState<Scalar> rk4(const NetworkState<Scalar>& s, const Problem<Scalar>& p, Scalar h) {
  const Scalar half = h / Scalar(2);
  const StateDerivative<Scalar> k1 = raw_drift(s, p);
  const StateDerivative<Scalar> k2 = raw_drift(advanced(s, half, k1), p);
  const StateDerivative<Scalar> k3 = raw_drift(advanced(s, half, k2), p);
  const StateDerivative<Scalar> k4 = raw_drift(advanced(s, h, k3), p);
  StateDerivative<Scalar> combo = k1;
  combo.add_scaled(Scalar(2), k2);
  combo.add_scaled(Scalar(2), k3);
  combo.add_scaled(Scalar(1), k4);
  NetworkState<Scalar> out = advanced(s, h / Scalar(6), combo);
  if (!out.all_finite()) throw NonFiniteState("non-finite state after RK4 step", -1);
  return out;
}

template <typename Scalar>
TraceRow make_row(std::int64_t step, double t, const NetworkState<Scalar>& s,
                  const Problem<Scalar>& p) {
  const StorageBreakdown st = storages(s, p);
  TraceRow row;
  row.step = step;
  row.t = t;
  row.V = st.V;
  row.V_H1 = st.V_H1;
  row.V_H2 = st.V_H2;
  row.V_H3 = st.V_H3;
  row.consensus_residual = static_cast<double>(consensus_residual(s, p));
  row.kkt_max_residual = kkt_residuals(s, p).max_residual();
  row.objective = static_cast<double>(objective_value(s, p));
  return row;
}

}  // namespace detail

/// One discretization step followed by clamping ξ, θ, μ to [0, ∞).
///
/// Euler: s + h·vector_field(s). RK4: classic four-stage combination of the
/// unprojected drift, with every stage state clamped. Throws NonFiniteState.
template <typename Scalar>
NetworkState<Scalar> step(const NetworkState<Scalar>& s, const Problem<Scalar>& p,
                          const FlowConfig& cfg) {
  const Scalar h(cfg.step_size);
  if (cfg.method == StepMethod::rk4) return detail::rk4(s, p, h);
  return detail::euler_from_field(s, h, vector_field(s, p));
}

/// Integrates until ‖vector_field‖∞ ≤ stop_tol or max_steps steps are taken.
/// Rows are recorded at step 0, every record_every steps, and at the final
/// state. NonFiniteState is rethrown carrying the failing step index.
template <typename Scalar>
FlowResult<Scalar> run_flow(const Problem<Scalar>& p, const FlowConfig& cfg,
                            std::optional<std::type_identity_t<NetworkState<Scalar>>> start =
                                std::nullopt) {
  cfg.validate();
  FlowResult<Scalar> res;
  NetworkState<Scalar> s = start ? *start : initial_state(p, cfg.init);
  p.check_shape(s);
  require_nonnegative(s);
  res.trace.step_size = cfg.step_size;

  auto record = [&](std::int64_t k) {
    const double t = static_cast<double>(k) * cfg.step_size;
    res.trace.rows.push_back(detail::make_row(k, t, s, p));
    if (cfg.record_snapshots) res.trace.snapshots.push_back({k, t, s.template cast<double>()});
  };

  record(0);
  std::int64_t k = 0;
  const Scalar h(cfg.step_size);
  while (true) {
    const StateDerivative<Scalar> field = vector_field(s, p);
    res.final_field_norm = static_cast<double>(field.inf_norm());
    if (res.final_field_norm <= cfg.stop_tol) {
      res.stop = StopReason::converged;
      break;
    }
    if (k == cfg.max_steps) {
      res.stop = StopReason::max_steps;
      break;
    }
    try {
      s = cfg.method == StepMethod::euler ? detail::euler_from_field(s, h, field)
                                          : detail::rk4(s, p, h);
    } catch (const NonFiniteState&) {
      throw NonFiniteState("non-finite state at step " + std::to_string(k + 1) +
                               " (step size too large?)",
                           k + 1);
    }
    ++k;
    if (k % cfg.record_every == 0) record(k);
  }
  if (res.trace.rows.back().step != k) record(k);
  res.steps = k;
  res.final_state = std::move(s);
  return res;
}

}  // namespace dsvm

#include "dsvm/diagnostics.hpp"

namespace dsvm {

std::vector<LyapunovViolation> check_monotone(const Trace& trace, double step_size, double c) {
  std::vector<LyapunovViolation> out;
  for (std::size_t k = 1; k < trace.rows.size(); ++k) {
    const TraceRow& prev = trace.rows[k - 1];
    const TraceRow& cur = trace.rows[k];
    const double delta_v = cur.V - prev.V;
    const double allowance = c * step_size * (cur.t - prev.t);
    if (delta_v > allowance) out.push_back({cur.t, delta_v, allowance});
  }
  return out;
}

namespace {

// Port quantities of the three subsystems at one snapshot.
struct PortSample {
  double V_H1 = 0.0, V_H2 = 0.0, V_H3 = 0.0;
  double t = 0.0;
  SwitchSignals switches;

  // H1: ẏ = (ẇ, ḃ); u = −(Lα, Lβ, ζ, η); dissipation −ẇᵀẇ − ẇᵀLẇ − ḃᵀLḃ.
  Eigen::MatrixXd w_dot;
  Eigen::VectorXd b_dot;
  Eigen::MatrixXd l_alpha;
  Eigen::VectorXd l_beta;
  Eigen::MatrixXd zeta;
  Eigen::VectorXd eta;
  double h1_dissipation = 0.0;

  // H2: ẏ = (α̇, β̇); u = (Lw, Lb).
  Eigen::MatrixXd alpha_dot;
  Eigen::VectorXd beta_dot;
  Eigen::MatrixXd l_w;
  Eigen::VectorXd l_b;

  // H3: ẏ = (ζ̇, η̇); u = (w, b).
  Eigen::MatrixXd zeta_dot;
  Eigen::VectorXd eta_dot;
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

PortSample sample_ports(const Snapshot& snap, const Problem<double>& p) {
  const NetworkState<double>& s = snap.state;
  const Graph& g = p.graph();
  const StateDerivative<double> f = vector_field(s, p);

  PortSample out;
  out.t = snap.t;
  out.switches = active_switch_sets(s, p);
  out.V_H1 = storage_h1_from_field(f);
  out.V_H2 = storage_h2(s, p);
  out.V_H3 = storage_h3_from(f, out.switches, p);

  out.w_dot = f.w;
  out.b_dot = f.b;
  out.l_alpha = laplacian_apply(g, s.alpha);
  out.l_beta = laplacian_apply(g, s.beta, 1);
  out.zeta = zeta(s.theta, p);
  out.eta = eta(s.theta, p);
  out.h1_dissipation = -f.w.squaredNorm() -
                       f.w.cwiseProduct(laplacian_apply(g, f.w)).sum() -
                       f.b.dot(laplacian_apply(g, f.b, 1));

  out.alpha_dot = f.alpha;
  out.beta_dot = f.beta;
  out.l_w = laplacian_apply(g, s.w);
  out.l_b = laplacian_apply(g, s.b, 1);

  // ζ and η are linear in θ, so their rates follow from θ̇.
  out.zeta_dot = zeta(f.theta, p);
  out.eta_dot = eta(f.theta, p);
  out.w = s.w;
  out.b = s.b;
  return out;
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

PassivityLedger passivity_ledger(const Trace& trace, const Problem<double>& problem) {
  if (trace.snapshots.size() < 2) {
    throw MissingSnapshots("passivity ledger needs at least two state snapshots");
  }
  PassivityLedger led;
  PortSample prev = sample_ports(trace.snapshots.front(), problem);
  const PortSample first = prev;
  for (std::size_t k = 1; k < trace.snapshots.size(); ++k) {
    PortSample cur = sample_ports(trace.snapshots[k], problem);
    const double dt = cur.t - prev.t;

    // H1: u = −(Lα, Lβ, ζ, η), paired with (ẇ, ḃ, ẇ, ḃ).
    const Eigen::MatrixXd w_dot_mid = 0.5 * (prev.w_dot + cur.w_dot);
    const Eigen::VectorXd b_dot_mid = 0.5 * (prev.b_dot + cur.b_dot);
    led.h1_port_work += -inner(w_dot_mid, cur.l_alpha - prev.l_alpha) -
                        b_dot_mid.dot(cur.l_beta - prev.l_beta) -
                        inner(w_dot_mid, cur.zeta - prev.zeta) -
                        b_dot_mid.dot(cur.eta - prev.eta);
    led.h1_osp_surplus += 0.5 * (prev.h1_dissipation + cur.h1_dissipation) * dt;

    // H2
    const double h2_work =
        inner(0.5 * (prev.alpha_dot + cur.alpha_dot), cur.l_w - prev.l_w) +
        (0.5 * (prev.beta_dot + cur.beta_dot)).dot(cur.l_b - prev.l_b);
    led.h2_port_work += h2_work;
    if (prev.switches == cur.switches) {
      const double gap = (cur.V_H2 - prev.V_H2) - h2_work;
      led.h2_max_switch_free_gap = std::max(led.h2_max_switch_free_gap, std::abs(gap));
      ++led.switch_free_intervals;
    }

    // H3
    led.h3_port_work += inner(0.5 * (prev.zeta_dot + cur.zeta_dot), cur.w - prev.w) +
                        (0.5 * (prev.eta_dot + cur.eta_dot)).dot(cur.b - prev.b);

    prev = std::move(cur);
    ++led.intervals;
  }
  led.h1_delta_storage = prev.V_H1 - first.V_H1;
  led.h2_delta_storage = prev.V_H2 - first.V_H2;
  led.h3_delta_storage = prev.V_H3 - first.V_H3;
  led.h1_gap = led.h1_delta_storage - led.h1_port_work;
  led.h2_gap = led.h2_delta_storage - led.h2_port_work;
  led.h3_gap = led.h3_delta_storage - led.h3_port_work;
  return led;
}

bool CertificateReport::h1_passive() const {
  return !passivity || passivity->h1_gap <= passivity_tolerance(passivity->h1_delta_storage);
}
bool CertificateReport::h2_passive() const {
  return !passivity || passivity->h2_gap <= passivity_tolerance(passivity->h2_delta_storage);
}
bool CertificateReport::h3_passive() const {
  return !passivity || passivity->h3_gap <= passivity_tolerance(passivity->h3_delta_storage);
}
bool CertificateReport::h2_lossless() const {
  return !passivity || passivity->h2_max_switch_free_gap <= kSwitchFreeH2Tolerance;
}
bool CertificateReport::passed() const {
  return lyapunov_violations.empty() && h1_passive() && h2_passive() && h3_passive() &&
         h2_lossless();
}

CertificateReport certify(const Trace& trace, const Problem<double>& problem, bool with_ledger,
                          double monotone_c) {
  CertificateReport rep;
  rep.lyapunov_violations = check_monotone(trace, trace.step_size, monotone_c);
  rep.lambda2 = lambda2(problem.graph());
  rep.gain_bound = 2.0 * rep.lambda2;
  if (!trace.snapshots.empty()) {
    const NetworkState<double>& last = trace.snapshots.back().state;
    const StorageBreakdown st = storages(last, problem);
    rep.V = st.V;
    rep.V_H1 = st.V_H1;
    rep.V_H2 = st.V_H2;
    rep.V_H3 = st.V_H3;
    rep.consensus_residual = consensus_residual(last, problem);
  } else if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    rep.V = last.V;
    rep.V_H1 = last.V_H1;
    rep.V_H2 = last.V_H2;
    rep.V_H3 = last.V_H3;
    rep.consensus_residual = last.consensus_residual;
  }
  if (with_ledger) rep.passivity = passivity_ledger(trace, problem);
  return rep;
}

}  // namespace dsvm

#include "dsvm/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "dsvm/trace_io.hpp"

namespace dsvm {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NegativeState*>(&e) || dynamic_cast<const NonFiniteState*>(&e) ||
      dynamic_cast<const OracleScaleExceeded*>(&e) || dynamic_cast<const InternalError*>(&e) ||
      dynamic_cast<const EmbedFailure*>(&e)) {
    return kExitDomainFailure;
  }
  return kExitUsage;
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json kkt_json(const KktReport& k) {
  return {{"stationarity_residual", k.stationarity_residual},
          {"primal_infeasibility", k.primal_infeasibility},
          {"dual_infeasibility", k.dual_infeasibility},
          {"complementarity", k.complementarity},
          {"consensus", k.consensus},
          {"max", k.max_residual()}};
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

// ---- gen-data --------------------------------------------------------------

struct GenDataArgs {
  Index n = 0;
  Index dim = 0;
  double sep = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a, std::ostream& out) {
  if (a.n < 1) throw InvalidParam("--n must be >= 1");
  if (a.dim < 1) throw InvalidParam("--dim must be >= 1");
  if (!(a.sep > 0.0)) throw InvalidParam("--sep (separation) must be > 0");
  const SyntheticSpec spec{a.n, a.dim, a.sep, a.seed};
  const Dataset ds = gen_synthetic(spec);
  std::ostringstream csv;
  write_dataset(csv, ds);
  const fs::path path(a.out);
  write_text_file(path, csv.str());
  fs::path sidecar = path;
  sidecar.replace_extension(".json");
  json meta = to_json(spec);
  meta["generator"] = "two_gaussian_blobs";
  meta["samples"] = ds.size();
  write_json_file(sidecar, meta);
  out << "wrote " << ds.size() << " samples to " << path.string() << " (parameters in "
      << sidecar.string() << ")\n";
  return kExitOk;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> max_steps;
  std::optional<double> step_size;
  std::optional<double> stop_tol;
  std::optional<std::int64_t> record_every;
  std::optional<std::string> method;
  std::optional<double> C;
  bool snapshots = false;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  RunConfig cfg = load_run_config(a.config);
  if (a.out_dir) cfg.output_dir = *a.out_dir;
  if (a.max_steps) cfg.flow.max_steps = *a.max_steps;
  if (a.step_size) cfg.flow.step_size = *a.step_size;
  if (a.stop_tol) cfg.flow.stop_tol = *a.stop_tol;
  if (a.record_every) cfg.flow.record_every = *a.record_every;
  if (a.method) {
    if (*a.method != "euler" && *a.method != "rk4") {
      throw ConfigError("config field 'flow.method': expected 'euler' or 'rk4', got '" +
                        *a.method + "'");
    }
    cfg.flow.method = parse_step_method(*a.method);
  }
  if (a.C) cfg.C = *a.C;
  if (a.snapshots) cfg.flow.record_snapshots = true;
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const FlowResult<double> res = execute_run(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const TraceRow& last = res.trace.rows.back();
  out << "stop_reason: " << to_string(res.stop) << "\n"
      << "steps: " << res.steps << "\n"
      << "objective: " << fmt(last.objective) << "\n"
      << "kkt_max_residual: " << fmt(last.kkt_max_residual) << "\n"
      << "consensus_residual: " << fmt(last.consensus_residual) << "\n"
      << "wall_time_s: " << fmt(wall) << "\n"
      << "output: " << cfg.output_dir.string() << "\n";
  return res.stop == StopReason::converged ? kExitOk : kExitDomainFailure;
}

// ---- check -----------------------------------------------------------------

struct CheckArgs {
  std::string dir;
  std::string ledger = "auto";
  double allowance = kDefaultMonotoneAllowance;
};

CertificateReport certify_directory(const fs::path& dir, const std::string& ledger,
                                    double allowance) {
  const bool have_snapshots = fs::exists(dir / kSnapshotsFile);
  bool with_ledger = false;
  if (ledger == "on") {
    if (!have_snapshots) {
      throw MissingSnapshots("passivity ledger requested but " + (dir / kSnapshotsFile).string() +
                             " is missing (rerun with --snapshots)");
    }
    with_ledger = true;
  } else if (ledger == "auto") {
    with_ledger = have_snapshots;
  }
  const TraceDirectory td = load_trace_directory(dir, with_ledger);
  const Problem<double> problem = build_problem(td.config, td.dataset);
  return certify(td.trace, problem, with_ledger, allowance);
}

void print_certificate(const CertificateReport& rep, std::ostream& out) {
  out << "lyapunov monotonicity: "
      << (rep.lyapunov_violations.empty() ? "ok" : "FAILED") << " ("
      << rep.lyapunov_violations.size() << " violations)\n";
  if (rep.passivity) {
    const PassivityLedger& p = *rep.passivity;
    out << "H1 gap " << fmt(p.h1_gap) << " (" << (rep.h1_passive() ? "ok" : "FAILED")
        << "), OSP surplus " << fmt(p.h1_osp_surplus) << "\n"
        << "H2 gap " << fmt(p.h2_gap) << " (" << (rep.h2_passive() ? "ok" : "FAILED")
        << "), switch-free max " << fmt(p.h2_max_switch_free_gap) << " over "
        << p.switch_free_intervals << " intervals (" << (rep.h2_lossless() ? "ok" : "FAILED")
        << ")\n"
        << "H3 gap " << fmt(p.h3_gap) << " (" << (rep.h3_passive() ? "ok" : "FAILED") << ")\n";
  } else {
    out << "passivity ledger: skipped (no snapshots)\n";
  }
  out << "final V " << fmt(rep.V) << " = H1 " << fmt(rep.V_H1) << " + H2 " << fmt(rep.V_H2)
      << " + H3 " << fmt(rep.V_H3) << "\n"
      << "consensus residual " << fmt(rep.consensus_residual) << ", lambda2 " << fmt(rep.lambda2)
      << ", gain bound " << fmt(rep.gain_bound) << "\n"
      << "certificate: " << (rep.passed() ? "PASSED" : "FAILED") << "\n";
}

int cmd_check(const CheckArgs& a, std::ostream& out) {
  const fs::path dir(a.dir);
  const CertificateReport rep = certify_directory(dir, a.ledger, a.allowance);
  write_json_file(dir / kCertificateFile, certificate_json(rep));
  print_certificate(rep, out);
  return rep.passed() ? kExitOk : kExitDomainFailure;
}

// ---- oracle ----------------------------------------------------------------

struct OracleArgs {
  std::string data;
  bool header = false;
  double C = 0.0;
  Index nodes = 1;
  std::string form = "network";
  std::optional<std::string> out_file;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  if (!(a.C > 0.0)) throw InvalidParam("--C must be > 0");
  if (a.nodes < 1) throw InvalidParam("--nodes must be >= 1");
  const Dataset ds = load_dataset(a.data, a.header);
  const CentralSolution sol = a.form == "central" ? solve_centralized(ds, a.C, a.nodes)
                                                  : solve_consensus_reference(ds, a.C, a.nodes);
  json j = solution_json(sol);
  j["form"] = a.form;
  j["C"] = a.C;
  j["nodes"] = a.nodes;
  if (a.out_file) {
    write_json_file(*a.out_file, j);
  } else {
    out << j.dump(2) << "\n";
  }
  return kExitOk;
}

// ---- report ----------------------------------------------------------------

int cmd_report(const std::string& dir_arg, std::ostream& out) {
  const fs::path dir(dir_arg);
  const json summary = read_json_file(dir / kSummaryFile);
  out << "run: " << dir.string() << "\n";
  auto num = [&](const char* key) {
    return summary.contains(key) && summary[key].is_number() ? fmt(summary[key].get<double>())
                                                             : std::string("?");
  };
  out << "stop reason " << summary.value("stop_reason", std::string("?")) << " after "
      << num("steps") << " steps (t = " << num("t_final") << ")\n"
      << "problem: " << num("nodes") << " nodes, " << num("samples") << " samples, d = "
      << num("dim") << ", C = " << num("C") << ", slack multiplier sign "
      << summary.value("slack_multiplier_sign", std::string("?")) << "\n"
      << "objective " << num("objective") << ", field norm " << num("final_field_norm")
      << ", consensus residual " << num("consensus_residual") << "\n";
  if (summary.contains("kkt") && summary["kkt"].is_object()) {
    const json& k = summary["kkt"];
    out << "KKT: stationarity " << fmt(k.value("stationarity_residual", 0.0)) << ", primal "
        << fmt(k.value("primal_infeasibility", 0.0)) << ", dual "
        << fmt(k.value("dual_infeasibility", 0.0)) << ", complementarity "
        << fmt(k.value("complementarity", 0.0)) << "\n";
  }
  const CertificateReport rep = certify_directory(dir, "auto", kDefaultMonotoneAllowance);
  print_certificate(rep, out);
  return kExitOk;
}

}  // namespace

json summary_json(const FlowResult<double>& res, const Problem<double>& p) {
  const KktReport kkt = kkt_residuals(res.final_state, p);
  const StorageBreakdown st = storages(res.final_state, p);
  const double l2 = lambda2(p.graph());
  return {{"stop_reason", std::string(to_string(res.stop))},
          {"steps", res.steps},
          {"t_final", res.trace.rows.back().t},
          {"final_field_norm", res.final_field_norm},
          {"objective", objective_value(res.final_state, p)},
          {"lagrangian", lagrangian_value(res.final_state, p)},
          {"consensus_residual", consensus_residual(res.final_state, p)},
          {"kkt", kkt_json(kkt)},
          {"V", st.V},
          {"V_H1", st.V_H1},
          {"V_H2", st.V_H2},
          {"V_H3", st.V_H3},
          {"lambda2", l2},
          {"gain_bound", 2.0 * l2},
          {"nodes", p.nodes()},
          {"samples", p.samples()},
          {"dim", p.dim()},
          {"C", p.C()},
          {"penalty", p.penalty()},
          {"slack_multiplier_sign", std::string(to_string(p.slack_sign()))},
          {"final_w", vec_json(res.final_state.w.rowwise().mean())},
          {"final_b", res.final_state.b.mean()}};
}

json certificate_json(const CertificateReport& rep) {
  json violations = json::array();
  for (const auto& v : rep.lyapunov_violations) {
    violations.push_back({{"t", v.t}, {"delta_V", v.delta_V}, {"allowance", v.allowance}});
  }
  json j = {{"passed", rep.passed()},
            {"V", rep.V},
            {"V_H1", rep.V_H1},
            {"V_H2", rep.V_H2},
            {"V_H3", rep.V_H3},
            {"lyapunov_violations", violations},
            {"consensus_residual", rep.consensus_residual},
            {"lambda2", rep.lambda2},
            {"gain_bound", rep.gain_bound},
            {"h1_passive", rep.h1_passive()},
            {"h2_passive", rep.h2_passive()},
            {"h3_passive", rep.h3_passive()},
            {"h2_lossless", rep.h2_lossless()}};
  if (rep.passivity) {
    const PassivityLedger& p = *rep.passivity;
    j["passivity"] = {
        {"intervals", p.intervals},
        {"H1", {{"delta_storage", p.h1_delta_storage}, {"port_work", p.h1_port_work},
                {"gap", p.h1_gap}, {"osp_surplus", p.h1_osp_surplus},
                {"tolerance", passivity_tolerance(p.h1_delta_storage)}}},
        {"H2", {{"delta_storage", p.h2_delta_storage}, {"port_work", p.h2_port_work},
                {"gap", p.h2_gap}, {"tolerance", passivity_tolerance(p.h2_delta_storage)},
                {"max_switch_free_gap", p.h2_max_switch_free_gap},
                {"switch_free_tolerance", kSwitchFreeH2Tolerance},
                {"switch_free_intervals", p.switch_free_intervals}}},
        {"H3", {{"delta_storage", p.h3_delta_storage}, {"port_work", p.h3_port_work},
                {"gap", p.h3_gap}, {"tolerance", passivity_tolerance(p.h3_delta_storage)}}}};
  } else {
    j["passivity"] = nullptr;
  }
  return j;
}

json solution_json(const CentralSolution& sol) {
  return {{"w", vec_json(sol.w)},
          {"b", sol.b},
          {"xi", vec_json(sol.xi)},
          {"theta", vec_json(sol.theta)},
          {"objective", sol.objective},
          {"regularizer", sol.regularizer},
          {"penalty", sol.penalty},
          {"b_degenerate", sol.b_degenerate},
          {"certificate", sol.certificate}};
}

FlowResult<double> execute_run(const RunConfig& cfg) {
  const Dataset ds = materialize_dataset(cfg);
  const Problem<double> problem = build_problem(cfg, ds);
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  // The directory is self-contained: the dataset is copied and the resolved
  // config points at the copy.
  std::ostringstream csv;
  write_dataset(csv, ds);
  write_text_file(dir / kDatasetFile, csv.str());
  RunConfig resolved = cfg;
  resolved.dataset_path = kDatasetFile;
  resolved.synthetic.reset();
  resolved.header = false;
  resolved.output_dir = ".";
  json cfg_json = to_json(resolved);
  if (cfg.synthetic) cfg_json["generated_from"] = to_json(*cfg.synthetic);
  write_json_file(dir / kConfigFile, cfg_json);

  FlowResult<double> res = run_flow(problem, cfg.flow);

  std::ostringstream trace;
  write_trace_csv(trace, res.trace.rows);
  write_text_file(dir / kTraceFile, trace.str());
  if (cfg.flow.record_snapshots) {
    write_json_file(dir / kSnapshotsFile, snapshots_to_json(res.trace.snapshots));
  } else {
    fs::remove(dir / kSnapshotsFile, ec);
  }
  write_json_file(dir / kSummaryFile, summary_json(res, problem));
  return res;
}

TraceDirectory load_trace_directory(const fs::path& dir, bool load_snapshots) {
  json cfg_json = read_json_file(dir / kConfigFile);
  cfg_json.erase("generated_from");
  TraceDirectory td{parse_run_config(cfg_json, dir), Dataset{}, Trace{}};
  td.dataset = materialize_dataset(td.config);
  const std::string text = read_text_file(dir / kTraceFile);
  std::istringstream in(text);
  td.trace.rows = read_trace_csv(in);
  td.trace.step_size = td.config.flow.step_size;
  if (load_snapshots && fs::exists(dir / kSnapshotsFile)) {
    td.trace.snapshots = snapshots_from_json(read_json_file(dir / kSnapshotsFile));
  }
  return td;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed SVM primal-dual gradient flow simulator", "dsvm"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic two-blob dataset (CSV + JSON)");
  gen_cmd->add_option("--n", gen.n, "Samples per class")->required();
  gen_cmd->add_option("--dim", gen.dim, "Feature dimension")->required();
  gen_cmd->add_option("--sep", gen.sep, "Distance between the class means")->required();
  gen_cmd->add_option("--seed", gen.seed, "PRNG seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate the flow described by a JSON config");
  run_cmd->add_option("config", run.config, "Run config (JSON)")->required();
  run_cmd->add_option("--out", run.out_dir, "Override output_dir");
  run_cmd->add_option("--max-steps", run.max_steps, "Override flow.max_steps");
  run_cmd->add_option("--step-size", run.step_size, "Override flow.step_size");
  run_cmd->add_option("--stop-tol", run.stop_tol, "Override flow.stop_tol");
  run_cmd->add_option("--record-every", run.record_every, "Override flow.record_every");
  run_cmd->add_option("--method", run.method, "Override flow.method (euler|rk4)");
  run_cmd->add_option("--C", run.C, "Override C");
  run_cmd->add_flag("--snapshots", run.snapshots, "Record full-state snapshots");

  CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "Certify a trace directory");
  check_cmd->add_option("dir", check.dir, "Trace directory written by run")->required();
  check_cmd->add_option("--ledger", check.ledger, "Passivity ledger: auto|on|off")
      ->check(CLI::IsMember({"auto", "on", "off"}))
      ->capture_default_str();
  check_cmd->add_option("--allowance", check.allowance, "Monotonicity allowance constant c")
      ->capture_default_str();

  OracleArgs orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Solve the soft-margin problem exactly");
  oracle_cmd->add_option("--data", orc.data, "Dataset CSV")->required();
  oracle_cmd->add_flag("--header", orc.header, "Skip one header line");
  oracle_cmd->add_option("--C", orc.C, "C (slack weight is nodes·C)")->required();
  oracle_cmd->add_option("--nodes", orc.nodes, "Node count m")->capture_default_str();
  oracle_cmd->add_option("--form", orc.form, "central: ½‖w‖²; network: (m/2)‖w‖²")
      ->check(CLI::IsMember({"central", "network"}))
      ->capture_default_str();
  oracle_cmd->add_option("--out", orc.out_file, "Write JSON here instead of stdout");

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Summarize a trace directory as text");
  report_cmd->add_option("dir", report_dir, "Trace directory")->required();

  std::vector<std::string> argv_store{"dsvm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_data(gen, out);
    if (*run_cmd) return cmd_run(run, out);
    if (*check_cmd) return cmd_check(check, out);
    if (*oracle_cmd) return cmd_oracle(orc, out);
    if (*report_cmd) return cmd_report(report_dir, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace dsvm

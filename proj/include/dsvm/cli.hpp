#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsvm/config.hpp"
#include "dsvm/diagnostics.hpp"
#include "dsvm/integrator.hpp"
#include "dsvm/oracle.hpp"

namespace dsvm {

enum ExitCode : int { kExitOk = 0, kExitDomainFailure = 1, kExitUsage = 2 };

/// Usage and input errors map to kExitUsage; failures of the computation
/// itself (divergence, oracle limits, internal errors) to kExitDomainFailure.
int exit_code_for(const std::exception& e);

/// Entry point of the `dsvm` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Files written by `run` and read back by `check` and `report`.
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kSnapshotsFile = "snapshots.json";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kDatasetFile = "dataset.csv";
inline constexpr const char* kCertificateFile = "certificate.json";

nlohmann::json summary_json(const FlowResult<double>& result, const Problem<double>& problem);
nlohmann::json certificate_json(const CertificateReport& report);
nlohmann::json solution_json(const CentralSolution& sol);

/// Runs `cfg` and writes the trace directory; returns the flow result.
FlowResult<double> execute_run(const RunConfig& cfg);

/// A trace directory loaded back into memory.
struct TraceDirectory {
  RunConfig config;
  Dataset dataset;
  Trace trace;
};

/// Throws IoError / ParseError on missing or malformed files; snapshots are
/// loaded only when requested and present.
TraceDirectory load_trace_directory(const std::filesystem::path& dir, bool load_snapshots);

}  // namespace dsvm

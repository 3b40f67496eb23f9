#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsvm/errors.hpp"
#include "dsvm/trace.hpp"

namespace dsvm {

inline constexpr const char* kTraceVersionLine = "# dsvm-trace v1";
inline constexpr const char* kTraceHeader =
    "step,t,V,V_H1,V_H2,V_H3,consensus_residual,kkt_max_residual,objective";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
/// Throws ParseError on a missing version line, wrong header, short or
/// malformed row.
std::vector<TraceRow> read_trace_csv(std::istream& in);

nlohmann::json state_to_json(const NetworkState<double>& state);
/// Throws ParseError on missing fields or inconsistent shapes.
NetworkState<double> state_from_json(const nlohmann::json& j);

nlohmann::json snapshots_to_json(const std::vector<Snapshot>& snapshots);
std::vector<Snapshot> snapshots_from_json(const nlohmann::json& j);

/// File helpers; throw IoError when a file cannot be opened, ParseError on
/// malformed JSON.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dsvm

#include "dsvm/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace dsvm {

namespace {

double parse_field(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("trace line " + std::to_string(line) + ": bad number '" +
                     std::string(field) + "'");
  }
  return value;
}

std::int64_t parse_step(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("trace line " + std::to_string(line) + ": bad step '" +
                     std::string(field) + "'");
  }
  return value;
}

Eigen::VectorXd vector_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(std::string("state: missing array '") + key + "'");
  }
  const auto& a = j[key];
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(std::string("state: non-number in '") + key + "'");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

// Matrices are stored as one array per node (column).
Eigen::MatrixXd matrix_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw ParseError(std::string("state: missing array '") + key + "'");
  }
  const auto& cols = j[key];
  const Eigen::Index n = static_cast<Eigen::Index>(cols.size());
  const Eigen::Index d = n ? static_cast<Eigen::Index>(cols[0].size()) : 0;
  Eigen::MatrixXd m(d, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& col = cols[static_cast<std::size_t>(c)];
    if (!col.is_array() || static_cast<Eigen::Index>(col.size()) != d) {
      throw ParseError(std::string("state: ragged matrix '") + key + "'");
    }
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto& e = col[static_cast<std::size_t>(r)];
      if (!e.is_number()) throw ParseError(std::string("state: non-number in '") + key + "'");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json cols = nlohmann::json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    cols.push_back(std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows()));
  }
  return cols;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceVersionLine << '\n' << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.V) << ','
        << format_double(r.V_H1) << ',' << format_double(r.V_H2) << ','
        << format_double(r.V_H3) << ',' << format_double(r.consensus_residual) << ','
        << format_double(r.kkt_max_residual) << ',' << format_double(r.objective) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceVersionLine) {
    throw ParseError("trace: missing version line '" + std::string(kTraceVersionLine) + "'");
  }
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ParseError("trace: unexpected column header");
  }
  std::vector<TraceRow> rows;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (in.eof()) {
      throw ParseError("trace line " + std::to_string(lineno) + ": truncated (no line terminator)");
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) {
      throw ParseError("trace line " + std::to_string(lineno) + ": expected 9 fields, got " +
                       std::to_string(f.size()));
    }
    TraceRow r;
    r.step = parse_step(f[0], lineno);
    r.t = parse_field(f[1], lineno);
    r.V = parse_field(f[2], lineno);
    r.V_H1 = parse_field(f[3], lineno);
    r.V_H2 = parse_field(f[4], lineno);
    r.V_H3 = parse_field(f[5], lineno);
    r.consensus_residual = parse_field(f[6], lineno);
    r.kkt_max_residual = parse_field(f[7], lineno);
    r.objective = parse_field(f[8], lineno);
    if (!rows.empty() && !(r.t > rows.back().t)) {
      throw ParseError("trace line " + std::to_string(lineno) + ": t is not increasing");
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("trace: no rows");
  return rows;
}

nlohmann::json state_to_json(const NetworkState<double>& s) {
  return {{"w", matrix_to_json(s.w)},         {"b", vector_to_json(s.b)},
          {"xi", vector_to_json(s.xi)},       {"theta", vector_to_json(s.theta)},
          {"mu", vector_to_json(s.mu)},       {"alpha", matrix_to_json(s.alpha)},
          {"beta", vector_to_json(s.beta)}};
}

NetworkState<double> state_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("state: expected an object");
  NetworkState<double> s;
  s.w = matrix_from(j, "w");
  s.b = vector_from(j, "b");
  s.xi = vector_from(j, "xi");
  s.theta = vector_from(j, "theta");
  s.mu = vector_from(j, "mu");
  s.alpha = matrix_from(j, "alpha");
  s.beta = vector_from(j, "beta");
  const Eigen::Index m = s.w.cols();
  const Eigen::Index n = s.xi.size();
  if (s.b.size() != m || s.beta.size() != m || s.alpha.cols() != m ||
      s.alpha.rows() != s.w.rows() || s.theta.size() != n || s.mu.size() != n) {
    throw ParseError("state: inconsistent field shapes");
  }
  return s;
}

nlohmann::json snapshots_to_json(const std::vector<Snapshot>& snapshots) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Snapshot& s : snapshots) {
    arr.push_back({{"step", s.step}, {"t", s.t}, {"state", state_to_json(s.state)}});
  }
  return {{"format", "dsvm-snapshots v1"}, {"snapshots", arr}};
}

std::vector<Snapshot> snapshots_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "dsvm-snapshots v1" ||
      !j.contains("snapshots") || !j["snapshots"].is_array()) {
    throw ParseError("snapshots: unrecognized document");
  }
  std::vector<Snapshot> out;
  for (const auto& e : j["snapshots"]) {
    if (!e.is_object() || !e.contains("step") || !e.contains("t") || !e.contains("state") ||
        !e["step"].is_number_integer() || !e["t"].is_number()) {
      throw ParseError("snapshots: malformed entry");
    }
    out.push_back({e["step"].get<std::int64_t>(), e["t"].get<double>(),
                   state_from_json(e["state"])});
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace dsvm

#pragma once

#include <cstdint>
#include <vector>

#include "dsvm/state.hpp"

namespace dsvm {

/// One recorded diagnostics row.
struct TraceRow {
  std::int64_t step = 0;
  double t = 0.0;
  double V = 0.0;
  double V_H1 = 0.0;
  double V_H2 = 0.0;
  double V_H3 = 0.0;
  double consensus_residual = 0.0;
  double kkt_max_residual = 0.0;
  double objective = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct Snapshot {
  std::int64_t step = 0;
  double t = 0.0;
  NetworkState<double> state;
};

/// Time-indexed record of a flow run. Rows are strictly increasing in t;
/// snapshots, when present, are taken at the same instants as the rows.
struct Trace {
  double step_size = 0.0;
  std::vector<TraceRow> rows;
  std::vector<Snapshot> snapshots;
};

}  // namespace dsvm

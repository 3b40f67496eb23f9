#include <sstream>

#include <gtest/gtest.h>

#include "dsvm/integrator.hpp"
#include "dsvm/trace_io.hpp"
#include "test_support.hpp"

using namespace dsvm;

namespace {
std::vector<TraceRow> short_run(bool snapshots, std::vector<Snapshot>* snaps = nullptr) {
  FlowConfig cfg;
  cfg.max_steps = 250;
  cfg.record_every = 50;
  cfg.record_snapshots = snapshots;
  cfg.init = {InitSpec::Kind::seeded_random, 1.0, 4};
  FlowResult<double> r = run_flow(dsvm::testing::two_point_problem(), cfg);
  if (snaps) *snaps = r.trace.snapshots;
  return r.trace.rows;
}
}  // namespace

TEST(TraceIo, CsvRoundTripIsExact) {
  const std::vector<TraceRow> rows = short_run(false);
  std::ostringstream out;
  write_trace_csv(out, rows);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind(std::string(kTraceVersionLine) + "\n" + kTraceHeader + "\n", 0), 0u);
  std::istringstream in(text);
  EXPECT_EQ(read_trace_csv(in), rows);
}

TEST(TraceIo, FormatDoubleRoundTrips) {
  for (double v : {0.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(TraceIo, RejectsCorruptCsv) {
  std::ostringstream out;
  write_trace_csv(out, short_run(false));
  const std::string good = out.str();

  std::istringstream truncated(good.substr(0, good.size() - 7));
  EXPECT_THROW(read_trace_csv(truncated), ParseError);

  std::istringstream no_version(good.substr(good.find('\n') + 1));
  EXPECT_THROW(read_trace_csv(no_version), ParseError);

  std::string bad = good;
  bad.replace(bad.rfind(',') + 1, 1, "x");
  std::istringstream garbled(bad);
  EXPECT_THROW(read_trace_csv(garbled), ParseError);

  std::istringstream header_only(std::string(kTraceVersionLine) + "\n" + kTraceHeader + "\n");
  EXPECT_THROW(read_trace_csv(header_only), ParseError);
}

TEST(TraceIo, SnapshotsRoundTripExactly) {
  std::vector<Snapshot> snaps;
  short_run(true, &snaps);
  ASSERT_FALSE(snaps.empty());
  const nlohmann::json j = nlohmann::json::parse(snapshots_to_json(snaps).dump());
  const std::vector<Snapshot> back = snapshots_from_json(j);
  ASSERT_EQ(back.size(), snaps.size());
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    EXPECT_EQ(back[k].step, snaps[k].step);
    EXPECT_EQ(back[k].t, snaps[k].t);
    EXPECT_TRUE(back[k].state == snaps[k].state);
  }
  EXPECT_THROW(snapshots_from_json(nlohmann::json::object()), ParseError);
  nlohmann::json broken = snapshots_to_json(snaps);
  broken["snapshots"][0]["state"].erase("mu");
  EXPECT_THROW(snapshots_from_json(broken), ParseError);
}

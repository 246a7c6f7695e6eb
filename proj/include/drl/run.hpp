#pragma once

// Seeded random runs, their JSON-lines traces, and replay.

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "drl/json.hpp"
#include "drl/simulation.hpp"

namespace drl {

struct RunResult {
  RunReport report;
  std::vector<TraceEntry> trace;
  SnapshotStore store;  // final contents
  bool finished = false;
};

/// Chooses events with a PRNG seeded from config.seed until max_events_per_run
/// chosen events have run or nothing is enabled, then finishes the run.
RunResult run_random(const RunConfig& config);

struct Trace {
  RunConfig config;
  std::vector<TraceEntry> entries;
  bool complete = false;  // the run's end marker was present
};

void write_trace(std::ostream& out, const RunConfig& config, const std::vector<TraceEntry>& entries, bool complete);
/// Reads a trace; a missing end marker yields complete = false, and a final
/// line cut short is ignored.
Trace read_trace(std::istream& in);

class ReplayDivergence : public std::runtime_error {
 public:
  ReplayDivergence(EventIndex index, const std::string& what)
      : std::runtime_error("divergence at entry " + std::to_string(index) + ": " + what), index_(index) {}
  EventIndex index() const { return index_; }

 private:
  EventIndex index_;
};

/// Re-executes the chosen events of a trace, regenerating policy entries and
/// checking every entry and hash against the recording. Throws
/// ReplayDivergence on the first mismatch.
RunResult replay(const Trace& trace);

/// Totals over many runs.
struct CampaignSummary {
  std::uint64_t runs = 0;
  std::uint64_t runs_with_violations = 0;
  std::map<std::string, std::uint64_t> violations_by_check;
  std::uint64_t chosen_events = 0;
  std::uint64_t quiescent_runs = 0;
  std::uint64_t terminated_at_end = 0;  // summed over runs
  std::uint64_t detections = 0;
  std::uint64_t detection_latency_total = 0;
  std::uint64_t liveness_misses = 0;
  std::uint64_t simple_garbage_positives = 0;
  std::uint64_t simple_garbage_literal_false_positives = 0;
  std::uint64_t msg_count_samples = 0;
  std::uint64_t msg_count_mismatches = 0;

  void add(const RunReport& r);
  std::uint64_t violations() const;
  double mean_detection_latency() const;
};

json to_json_value(const CampaignSummary& s);
json to_json_value(const RunConfig& c);
RunConfig run_config_from_json(const json& j);
json to_json_value(const RunReport& r);
json to_json_value(const TraceEntry& e);
TraceEntry trace_entry_from_json(const json& j);

}  // namespace drl

#pragma once

#include "packbot/harness/scenario.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace packbot::harness {

/// One line of the append-only trial trace.
struct TraceRecord {
  int trial = 0;
  double sim_time = 0.0;
  int subtask = 0;
  int step = 0;  // execution order within the trial
  std::string skill;
  std::string object;
  std::string outcome;
  std::string origin;
};

struct CategoryTally {
  int success = 0;
  int attempts = 0;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRecord> records;
  std::map<std::string, CategoryTally> categories;  // display name -> tally
  bool seal_attempted = false;
  bool sealed = false;
  double sim_time = 0.0;
  std::uint64_t final_hash = 0;
  int recovery_steps = 0;
  int subtasks_done = 0;
  int subtasks_failed = 0;
};

/// Full pipeline for one seed: reset, decompose/expand, then the
/// resolve-execute-monitor loop until the plan finishes. Success is counted
/// from simulator ground truth (instances actually in the box).
TrialResult run_trial(const Scenario& scenario, std::uint64_t seed);

struct TrialReport {
  std::string scenario_name;
  std::uint64_t base_seed = 0;
  std::map<std::string, CategoryTally> categories;
  std::vector<TrialResult> trials;
};

/// Seeds base..base+trials-1, optionally across worker threads. Aggregation
/// is order-independent.
TrialReport run_batch(const Scenario& scenario, int jobs = 1);

/// Human-readable category label used in report rows.
std::string category_display_name(skills::ObjectCategory c);

// Trace files: one JSON object per line; a header line carries the scenario
// path and seed, a footer line the final world hash.
void write_trace(std::ostream& out, const Scenario& scenario, const TrialResult& result);
void write_trace_file(const std::string& path, const Scenario& scenario,
                      const std::vector<TrialResult>& results);

struct ReplayResult {
  bool ok = false;
  std::string message;
};

/// Re-run every trial recorded in a trace file and verify that the fresh
/// records and final world hashes match the file byte-for-byte.
ReplayResult replay_trace(const std::string& trace_path);

}  // namespace packbot::harness

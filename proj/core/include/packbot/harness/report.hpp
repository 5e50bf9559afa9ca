#pragma once

#include "packbot/harness/trial.hpp"

#include <string>
#include <vector>

namespace packbot::harness {

struct ReportRow {
  std::string object;
  int success = 0;
  int attempts = 0;
};

/// Success rate formatted with one decimal, e.g. 5/6 -> "83.3%".
std::string format_rate(int success, int attempts);

/// Plain-text table with columns Object, Success Count, Total Attempts,
/// Success Rate. Byte-stable for a given row list.
std::string render_table(const std::vector<ReportRow>& rows);

/// Machine-readable JSON rendering of the same rows.
std::string render_machine(const std::vector<ReportRow>& rows, const std::string& scenario_name,
                           std::uint64_t base_seed, int trials);

std::vector<ReportRow> report_rows(const TrialReport& report);

}  // namespace packbot::harness

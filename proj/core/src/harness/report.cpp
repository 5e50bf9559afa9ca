#include "packbot/harness/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace packbot::harness {

std::string format_rate(int success, int attempts) {
  if (attempts == 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * success / attempts);
  return buf;
}

std::string render_table(const std::vector<ReportRow>& rows) {
  std::size_t name_width = std::string("Object").size();
  for (const auto& row : rows) name_width = std::max(name_width, row.object.size());

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-*s  %13s  %14s  %12s\n", static_cast<int>(name_width),
                "Object", "Success Count", "Total Attempts", "Success Rate");
  out << line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-*s  %13d  %14d  %12s\n", static_cast<int>(name_width),
                  row.object.c_str(), row.success, row.attempts,
                  format_rate(row.success, row.attempts).c_str());
    out << line;
  }
  return out.str();
}

std::string render_machine(const std::vector<ReportRow>& rows, const std::string& scenario_name,
                           std::uint64_t base_seed, int trials) {
  nlohmann::json j;
  j["scenario"] = scenario_name;
  j["base_seed"] = base_seed;
  j["trials"] = trials;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"object", row.object},
                         {"success_count", row.success},
                         {"total_attempts", row.attempts},
                         {"success_rate", row.attempts ? 1.0 * row.success / row.attempts : 0.0}});
  }
  return j.dump(2) + "\n";
}

std::vector<ReportRow> report_rows(const TrialReport& report) {
  std::vector<ReportRow> rows;
  for (const auto& [name, tally] : report.categories) {
    if (name == "Seal") continue;  // appended last
    rows.push_back({name, tally.success, tally.attempts});
  }
  auto seal = report.categories.find("Seal");
  if (seal != report.categories.end())
    rows.push_back({"Seal", seal->second.success, seal->second.attempts});
  return rows;
}

}  // namespace packbot::harness

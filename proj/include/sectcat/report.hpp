#pragma once

#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sectcat {

using ordered_json = nlohmann::ordered_json;

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  exit_determinate = 0,
  exit_input_error = 1,
  exit_refused = 2,
  exit_undetermined = 3,
};

/// Result of one command. `value` is null when no determinate answer exists.
struct Report {
  std::string command;
  std::string model;
  int cap = 0;
  bool complete = false;
  ordered_json value;  // null by default
  std::string status;
  std::vector<std::string> witnesses;
  std::vector<std::string> notes;
  ordered_json details = ordered_json::object();
  std::string summary;  // one human-readable line
  int exit_code = exit_determinate;
  std::optional<double> timing_ms;  // only filled on request, keeps output reproducible
};

enum class ReportFormat { text, json };

inline ordered_json to_json(const Report& r) {
  ordered_json j;
  j["command"] = r.command;
  j["model"] = r.model;
  j["cap"] = r.cap;
  j["complete"] = r.complete;
  j["value"] = r.value;
  j["status"] = r.status;
  j["summary"] = r.summary;
  j["witnesses"] = r.witnesses;
  j["notes"] = r.notes;
  j["details"] = r.details;
  j["timing_ms"] = r.timing_ms ? ordered_json(*r.timing_ms) : ordered_json(nullptr);
  return j;
}

inline std::string emit_report(const Report& r, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream out;
  out << r.summary << "\n";
  out << "  command:  " << r.command << "\n";
  out << "  model:    " << r.model << "\n";
  out << "  cap:      " << r.cap << (r.complete ? " (sufficient)" : " (not certified sufficient)") << "\n";
  out << "  status:   " << r.status << "\n";
  out << "  value:    " << (r.value.is_null() ? std::string("undetermined") : r.value.dump()) << "\n";
  if (!r.witnesses.empty()) {
    out << "  witnesses:\n";
    for (const auto& w : r.witnesses) out << "    - " << w << "\n";
  }
  if (!r.notes.empty()) {
    out << "  notes:\n";
    for (const auto& n : r.notes) out << "    - " << n << "\n";
  }
  if (r.timing_ms) out << "  time:     " << *r.timing_ms << " ms\n";
  return out.str();
}

}  // namespace sectcat

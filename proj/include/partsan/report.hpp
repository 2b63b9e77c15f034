//===-- report.hpp - Run reports and their text/JSON forms -----*- C++ -*-===//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "partsan/common.hpp"

namespace partsan {

struct ViolationRecord {
  std::string kind;
  PartitionId partition = 0;
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  std::string access = "-";        // "R", "W", or "-" for non-memory findings
  std::optional<std::size_t> step;  // workload index
  std::string detail;

  friend bool operator==(const ViolationRecord&, const ViolationRecord&) = default;
};

struct EventRecord {
  std::string kind;  // DISPATCH, COMPLETE, DEADLINE_MISS, RESET
  Tick time = 0;     // virtual
  PartitionId partition = 0;
  std::optional<ProcessId> process;
  std::string detail;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

enum class Verdict : std::uint8_t { Match, Mismatch };

const char* to_string(Verdict verdict);

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string slowdown_factor = "1";
  Tick raw_ticks = 0;
  Tick virtual_ticks = 0;
  std::vector<EventRecord> events;
  std::vector<ViolationRecord> violations;
  Verdict verdict = Verdict::Match;
  std::size_t missing = 0;     // expected patterns with no matching record
  std::size_t unexpected = 0;  // records no pattern accounts for

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

enum class ReportFormat : std::uint8_t { Text, Json };

/// "text" or "json"; throws ConfigError otherwise.
ReportFormat parse_report_format(std::string_view text);

std::string emit_report(const RunReport& report, ReportFormat format);
nlohmann::json report_to_json(const RunReport& report);
/// Inverse of report_to_json. Throws ConfigError on malformed input.
RunReport report_from_json(const nlohmann::json& doc);
RunReport parse_report(std::string_view json_text);

/// Every kind a ViolationRecord may carry.
const std::vector<std::string>& known_violation_kinds();

}  // namespace partsan

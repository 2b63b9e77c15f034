//===-- builtin_scenarios.hpp - Scenarios shipped with the tool -*- C++ -*-===//
//
// The JSON files under scenarios/ are compiled into the library at build
// time, so every builtin can be run by name.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partsan/report.hpp"
#include "partsan/runner.hpp"
#include "partsan/scenario.hpp"

namespace partsan {

struct EmbeddedScenario {
  const char* name;
  const char* json;
};

/// Sorted by name. Defined in generated code.
const std::vector<EmbeddedScenario>& embedded_scenarios();

std::vector<std::string> builtin_scenario_names();
std::optional<std::string_view> builtin_scenario_text(std::string_view name);
/// Throws ConfigError for an unknown name.
Scenario builtin_scenario(std::string_view name);

struct BatchEntry {
  std::string name;
  RunReport report;
  std::string rendered;  // report in the requested format
};

/// Runs every builtin with the same options. Scenarios run concurrently on
/// up to `jobs` threads (0 picks the hardware concurrency); results come back
/// in name order regardless.
std::vector<BatchEntry> run_all_builtins(const RunOptions& options, ReportFormat format,
                                         unsigned jobs = 0);

}  // namespace partsan

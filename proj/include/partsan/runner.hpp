//===-- runner.hpp - Workload interpreter ----------------------*- C++ -*-===//
//
// Runs a scenario's workload under the partition schedule. Each partition's
// main program (steps without a process) runs first, in INIT; once it is
// exhausted the partition starts and its processes are released. Every
// finding is recorded and the run continues to the end of the workload.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>

#include "partsan/report.hpp"
#include "partsan/scenario.hpp"

namespace partsan {

struct RunOptions {
  std::uint64_t seed = 0;
  std::optional<Ratio> slowdown;             // overrides the scenario's factor
  std::optional<std::uint32_t> granularity;  // shadow granularity, default 8
  std::optional<std::uint64_t> redzone;
  std::optional<bool> legacy_get_my_id;      // forces every partition
  std::optional<CheckCosts> check_costs;
  std::optional<std::uint64_t> step_cost;
  bool drop_padding = false;                 // behave as if no padding were declared
};

/// Deterministic in (scenario, options). Throws ConfigError only for
/// problems the loader cannot see, such as declared regions that do not fit
/// the chosen granularity.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace partsan

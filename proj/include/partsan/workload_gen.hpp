//===-- workload_gen.hpp - Seeded clean workloads --------------*- C++ -*-===//
//
// Random workloads that stay in bounds, initialize bytes before using them
// and keep arithmetic representable. A correct simulator reports nothing for
// them. Used by the GENERATE step and by the property tests.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "partsan/msan_shadow.hpp"
#include "partsan/scenario.hpp"

namespace partsan {

struct CleanStepContext {
  PartitionId partition = 0;
  std::optional<ProcessId> process;
  std::string region;
  std::uint64_t region_size = 0;
  ReservedInitConfig reserved_init;
  bool allow_idle = true;
};

/// Bytes of the region are assumed uninitialized when generation starts.
std::vector<Step> generate_clean_steps(std::mt19937_64& rng, const CleanStepContext& context,
                                       std::uint32_t count);

struct GenOptions {
  std::uint32_t max_partitions = 3;
  std::uint32_t max_processes = 8;
  Tick max_frame_len = 1000;
  std::uint32_t max_steps_per_body = 40;
  bool periodic = true;
};

/// A whole scenario: partitions, a random major frame, processes with their
/// own regions, and clean bodies. Deadlines are generous but not infinite.
Scenario generate_clean_scenario(std::uint64_t seed, const GenOptions& options = {});

}  // namespace partsan

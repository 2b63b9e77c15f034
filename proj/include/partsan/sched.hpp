//===-- sched.hpp - Cyclic partition schedule and time model ---*- C++ -*-===//
//
// Time is counted twice. Raw ticks accumulate the cost of every executed
// workload step, including the overhead of each sanitizer check it ran.
// Virtual time is what the partitions observe: raw ticks divided by the
// slowdown factor and rounded down. Windows, deadlines and port freshness
// are all measured in virtual time.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partsan/common.hpp"

namespace partsan {

/// A positive rational number.
struct Ratio {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  /// "2", "3/2"; throws ConfigError for zero or malformed input.
  static Ratio parse(std::string_view text);
  std::string str() const;
  /// floor(value * num / den)
  std::uint64_t scale_floor(std::uint64_t value) const;
  bool at_least_one() const { return num >= den; }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct CheckCounts {
  std::uint64_t asan = 0;
  std::uint64_t msan = 0;
  std::uint64_t ub = 0;

  CheckCounts& operator+=(const CheckCounts& other) {
    asan += other.asan;
    msan += other.msan;
    ub += other.ub;
    return *this;
  }
  friend bool operator==(const CheckCounts&, const CheckCounts&) = default;
};

/// Raw ticks charged per executed check.
struct CheckCosts {
  std::uint64_t asan = 1;
  std::uint64_t msan = 1;
  std::uint64_t ub = 1;
};

class TimeModel {
 public:
  TimeModel(Ratio slowdown, CheckCosts costs);

  Tick raw_ticks() const { return raw_; }
  Tick virtual_now() const;
  const Ratio& slowdown() const { return slowdown_; }
  const CheckCosts& costs() const { return costs_; }

  /// raw += base + sum(count * cost)
  void advance(std::uint64_t step_base_cost, const CheckCounts& counts);

  /// Advances raw time to the first tick at which virtual time reaches
  /// `target`. No-op when already there.
  void advance_virtual_to(Tick target);

 private:
  Ratio slowdown_;
  CheckCosts costs_;
  Tick raw_ = 0;
};

struct Window {
  PartitionId partition = 0;
  Tick start = 0;
  Tick len = 0;

  Tick end() const { return start + len; }
};

struct WindowPosition {
  PartitionId partition = 0;
  Tick remaining = 0;   // ticks left in this window
  std::size_t index = 0;
};

struct FrameDefect {
  std::size_t window_index = 0;  // offending window, or windows.size() for frame-level issues
  std::string message;
};

class MajorFrame {
 public:
  /// Throws ConfigError unless windows are sorted, non-empty, disjoint and
  /// cover [0, frame_len) exactly.
  MajorFrame(Tick frame_len, std::vector<Window> windows);

  static std::optional<FrameDefect> find_defect(Tick frame_len, const std::vector<Window>& windows);

  Tick frame_len() const { return frame_len_; }
  const std::vector<Window>& windows() const { return windows_; }

  WindowPosition current_window(Tick virtual_now) const;

  /// Earliest t >= virtual_now lying inside a window of `partition`.
  std::optional<Tick> next_window_start(PartitionId partition, Tick virtual_now) const;

 private:
  Tick frame_len_;
  std::vector<Window> windows_;
};

enum class ProcessState : std::uint8_t { Dormant, Ready, Running, Waiting };

const char* to_string(ProcessState state);

struct ProcessConfig {
  ProcessId id = 0;
  PartitionId partition = 0;
  std::optional<Tick> period;  // absent for aperiodic processes
  Tick time_capacity = 0;
  int priority = 0;
  std::uint32_t activations = 1;  // releases of a periodic process
};

struct Process {
  ProcessConfig config;
  ProcessState state = ProcessState::Dormant;
  Tick activation = 0;       // virtual time of the current release
  Tick next_release = 0;
  std::uint32_t releases = 0;
  Ratio budget_multiplier;   // local timeout override
  bool miss_reported = false;

  ProcessId id() const { return config.id; }
};

/// A timeout override stretches the deadline budget of one process.
struct TimeoutOverride {
  ProcessId process = 0;
  Ratio multiplier;  // >= 1
};

struct DeadlineMiss {
  ProcessId process = 0;
  Tick activation = 0;
  Tick elapsed = 0;
  Tick budget = 0;
};

/// Deadline budget after applying the process's timeout override.
Tick effective_budget(const Process& process);

/// DeadlineMiss iff virtual_now - activation exceeds the effective budget.
std::optional<DeadlineMiss> check_deadline(const Process& process, Tick virtual_now);

/// Processes of one partition.
class ProcessTable {
 public:
  explicit ProcessTable(PartitionId partition) : partition_(partition) {}

  PartitionId partition() const { return partition_; }
  void add(ProcessConfig config);
  Process& at(ProcessId id);
  const Process& at(ProcessId id) const;
  std::vector<Process>& processes() { return processes_; }
  const std::vector<Process>& processes() const { return processes_; }
  std::optional<ProcessId> running() const;

  /// Selects the highest-priority READY (or still RUNNING) process, lowest
  /// id on ties. The winner becomes RUNNING and a displaced RUNNING process
  /// drops back to READY. std::nullopt means the partition idles.
  std::optional<ProcessId> dispatch();

  /// Makes a process READY with the given activation time.
  void release(ProcessId id, Tick now);

 private:
  PartitionId partition_;
  std::vector<Process> processes_;  // sorted by id
};

inline std::optional<ProcessId> dispatch(ProcessTable& table) { return table.dispatch(); }

/// ARINC return codes relevant to GET_MY_ID.
enum class ReturnCode : std::uint8_t { NoError, InvalidMode };

const char* to_string(ReturnCode code);

inline constexpr ProcessId kMainProcessId = 0;

struct GetMyIdResult {
  ReturnCode code = ReturnCode::NoError;
  ProcessId id = kMainProcessId;

  friend bool operator==(const GetMyIdResult&, const GetMyIdResult&) = default;
};

/// `caller` is empty for the partition main context. Legacy mode reproduces
/// older service revisions that answered INVALID_MODE there.
GetMyIdResult get_my_id(std::optional<ProcessId> caller, bool legacy_mode = false);

}  // namespace partsan

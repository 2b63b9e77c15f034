//===-- scenario.hpp - Scenario files and workload steps -------*- C++ -*-===//
//
// A scenario describes partitions, their schedule, ports, type information
// for syscall templates, the guest workload and the violations the run is
// expected to produce. The loader validates everything up front; errors
// carry a JSON pointer into the offending document.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "partsan/common.hpp"
#include "partsan/msan_shadow.hpp"
#include "partsan/ports.hpp"
#include "partsan/sched.hpp"
#include "partsan/syscall_annotations.hpp"
#include "partsan/ub_checks.hpp"

namespace partsan {

struct RegionDecl {
  std::string label;
  std::uint64_t size = 0;
  std::string type;  // optional; typed regions get their padding unpoisoned
};

struct PartitionConfig {
  PartitionId id = 0;
  std::uint64_t memory_size = 0;
  std::vector<RegionDecl> regions;
  std::vector<ProcessConfig> processes;
  bool legacy_get_my_id = false;
};

struct TimeConfig {
  Ratio slowdown;
  std::uint64_t step_cost = 1;
  CheckCosts costs;
  Tick frame_len = 0;
  std::vector<Window> windows;
  std::vector<TimeoutOverride> timeout_overrides;
};

enum class PortKind : std::uint8_t { Sampling, Queueing };

/// Both ends of one named port.
struct PortDecl {
  std::string name;
  PortKind kind = PortKind::Queueing;
  PartitionId source = 0;
  PartitionId destination = 0;
  std::uint64_t max_message_size = 0;
  Tick refresh_period = 0;
  std::size_t capacity = 0;
};

enum class StepOp : std::uint8_t {
  Alloc,
  Write,
  Read,
  Copy,
  Arith,
  Div,
  Shift,
  Trunc,
  FloatCast,
  AlignCheck,
  NullCheck,
  BoolCheck,
  EnumCheck,
  Syscall,
  Send,
  Receive,
  SamplingWrite,
  SamplingRead,
  BranchOn,
  ResetPartition,
  GetMyId,
  Idle,
  Generate,
};

const char* to_string(StepOp op);
std::optional<StepOp> parse_step_op(std::string_view text);

/// A guest location: a region label plus a signed byte offset from its base,
/// or an absolute partition offset when the label is empty.
struct AddrRef {
  std::string region;
  std::int64_t offset = 0;
};

/// Integer operand of a UB step: a literal, or a little-endian value of the
/// operand type's width loaded from guest memory.
struct Operand {
  std::optional<wide_int> literal;
  AddrRef mem;
};

struct SyscallBinding {
  AddrRef addr;
  std::uint64_t len = 0;
};

struct Step {
  StepOp op = StepOp::Idle;
  PartitionId partition = 0;
  std::optional<ProcessId> process;  // empty: the partition's main program

  // ALLOC
  std::string label;
  std::uint64_t size = 0;
  std::string type;

  // memory operands
  AddrRef addr;  // WRITE/READ/BRANCH_ON/ports/ALIGN/NULL/GENERATE target
  AddrRef dst;   // COPY destination; addr is the source
  std::uint64_t len = 0;
  std::vector<std::uint8_t> data;

  // UB operands
  ArithOp arith = ArithOp::Add;
  IntSpec int_spec;
  IntSpec to_spec;
  Operand a;
  Operand b;
  double float_value = 0.0;
  std::uint64_t align = 1;
  EnumSpec enum_spec;

  // SYSCALL
  std::string syscall;
  std::map<std::string, SyscallBinding, std::less<>> bindings;
  bool succeeds = true;

  // ports
  std::string port;
  std::optional<std::vector<std::uint8_t>> expect_data;
  std::optional<Validity> expect_validity;

  // GET_MY_ID
  std::optional<ProcessId> expect_id;

  // IDLE, GENERATE
  Tick ticks = 0;
  std::uint32_t count = 0;
};

/// One expected finding. Unset fields match anything.
struct ExpectPattern {
  std::string kind;
  std::optional<PartitionId> partition;
  std::optional<std::string> region;
  std::optional<std::int64_t> offset;  // relative to `region`, absolute without it
  std::optional<std::size_t> step;
  std::optional<Ratio> when_slowdown;  // pattern only applies at this factor
};

struct Scenario {
  std::string name;
  std::vector<PartitionConfig> partitions;
  TimeConfig time;
  std::vector<PortDecl> ports;
  TypeSizeTable types;
  PaddingRegistry padding;
  ReservedInitConfig reserved_init;
  std::vector<SyscallSpec> syscalls;
  std::vector<Step> workload;
  std::vector<ExpectPattern> expect;

  const PartitionConfig* find_partition(PartitionId id) const;
  const SyscallSpec* find_syscall(std::string_view name) const;
  const PortDecl* find_port(std::string_view name) const;
};

/// Throws ConfigError (with a JSON pointer) on any schema violation.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Consistency checks that do not depend on the document layout. Called by
/// parse_scenario; generated scenarios should call it too.
void validate_scenario(const Scenario& scenario);

}  // namespace partsan

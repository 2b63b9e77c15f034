//===-- guest_memory.hpp - Partition memory with redzoned regions -*- C++ -*-===//
//
// Each partition owns a fixed byte store. Regions are carved out bump-pointer
// style while the partition is in its INIT phase; everything not explicitly
// allocated stays blacklisted. All instrumented loads and stores go through
// checked_read/checked_write.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partsan/asan_shadow.hpp"
#include "partsan/common.hpp"
#include "partsan/msan_shadow.hpp"

namespace partsan {

enum class MemoryPhase : std::uint8_t { Init, Running };

/// Offset 0 acts as the guest null pointer; the first bytes of every
/// partition are never handed out.
inline constexpr std::uint64_t kNullGuardBytes = 16;
inline constexpr std::uint64_t kDefaultRedzone = 16;

struct MemoryOptions {
  std::uint32_t granularity = 8;
  std::uint64_t redzone = kDefaultRedzone;  // requested per side, rounded up to granularity
  ReservedInitConfig reserved_init;
};

struct Region {
  GuestAddr base;
  std::uint64_t payload_len = 0;
  std::uint64_t redzone_left = 0;
  std::uint64_t redzone_right = 0;  // includes the unaddressable tail of a partial granule
  std::string label;

  std::uint64_t span_begin() const { return base.offset - redzone_left; }
  std::uint64_t span_end() const { return base.offset + payload_len + redzone_right; }
};

class PartitionMemory {
 public:
  /// Throws ConfigError for a zero or unaligned size or bad options.
  PartitionMemory(PartitionId partition, std::uint64_t size_bytes, MemoryOptions options = {});

  PartitionId partition() const { return partition_; }
  std::uint64_t size() const { return bytes_.size(); }
  MemoryPhase phase() const { return phase_; }
  const MemoryOptions& options() const { return options_; }
  const std::vector<Region>& regions() const { return regions_; }

  const ShadowMap& shadow() const { return shadow_; }
  const InitShadow& init_shadow() const { return init_; }
  InitShadow& init_shadow() { return init_; }

  /// Moves the partition to RUNNING; the region table is frozen from here on.
  void start();

  /// Throws PhaseError once running, OutOfMemory when the span does not fit.
  Region alloc_region(std::uint64_t payload_len, std::string label, OriginId origin = kNoOrigin);

  /// Loads do not change initialization state.
  std::optional<AsanViolation> checked_read(std::uint64_t offset,
                                            std::span<std::uint8_t> out) const;

  /// Stores mark the span initialized unless the whole value equals the
  /// reserved-init pattern.
  std::optional<AsanViolation> checked_write(std::uint64_t offset,
                                             std::span<const std::uint8_t> bytes,
                                             OriginId origin);

  /// Back to INIT with an empty region table and all memory poisoned as
  /// PARTITION_RESET.
  void reset();

  /// Uninstrumented accesses, standing in for kernel and loader code.
  void raw_store(std::uint64_t offset, std::span<const std::uint8_t> bytes);
  std::span<const std::uint8_t> raw_bytes() const { return bytes_; }

  /// The region whose span (payload plus redzones) contains `offset`, else the
  /// closest region by distance; nullptr when there are no regions.
  const Region* nearest_region(std::uint64_t offset) const;

 private:
  std::optional<AsanViolation> check(std::uint64_t offset, std::uint64_t len,
                                     AccessKind access) const;

  PartitionId partition_;
  MemoryOptions options_;
  MemoryPhase phase_ = MemoryPhase::Init;
  std::vector<std::uint8_t> bytes_;
  ShadowMap shadow_;
  InitShadow init_;
  std::vector<Region> regions_;
  std::uint64_t cursor_;
};

}  // namespace partsan

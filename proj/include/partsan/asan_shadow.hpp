//===-- asan_shadow.hpp - Address-validity shadow map ----------*- C++ -*-===//
//
// One shadow byte summarizes `granularity` partition bytes:
//   0x00          all bytes addressable
//   0x01..g-1     that many leading bytes addressable, the rest poisoned
//   >= 0xF0       whole granule poisoned; the value names the poison kind
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partsan/common.hpp"

namespace partsan {

enum class PoisonKind : std::uint8_t {
  LeftRedzone = 0xF1,
  RightRedzone = 0xF3,
  PartitionReset = 0xF8,
  ManualBlacklist = 0xFE,
};

inline constexpr std::uint8_t kFirstPoisonCode = 0xF0;

/// Kinds reported by address checks. Every PoisonKind plus accesses that fall
/// outside the partition entirely.
enum class AsanErrorKind : std::uint8_t {
  LeftRedzone,
  RightRedzone,
  PartitionReset,
  ManualBlacklist,
  WildAddress,
};

const char* to_string(AsanErrorKind kind);
AsanErrorKind error_kind_for(PoisonKind kind);
std::optional<PoisonKind> poison_kind_from_code(std::uint8_t code);

struct AsanViolation {
  AsanErrorKind kind = AsanErrorKind::WildAddress;
  GuestAddr addr;  // lowest invalid byte of the requested range
  AccessKind access = AccessKind::Read;
  std::uint64_t requested_len = 0;
  std::string region_label;  // nearest region, filled in by PartitionMemory

  friend bool operator==(const AsanViolation&, const AsanViolation&) = default;
};

bool is_valid_granularity(std::uint32_t granularity);

/// Shadow bytes needed for `memory_size` partition bytes. Throws ConfigError
/// for an unsupported granularity or a size that is not a multiple of it.
std::uint64_t shadow_size_for(std::uint64_t memory_size, std::uint32_t granularity);

class ShadowMap {
 public:
  /// The whole space starts out poisoned as `initial`.
  ShadowMap(PartitionId partition, std::uint64_t memory_size, std::uint32_t granularity,
            PoisonKind initial = PoisonKind::ManualBlacklist);

  PartitionId partition() const { return partition_; }
  std::uint32_t granularity() const { return granularity_; }
  std::uint64_t memory_size() const { return memory_size_; }
  std::span<const std::uint8_t> bytes() const { return shadow_; }
  std::uint8_t shadow_byte(std::uint64_t index) const { return shadow_.at(index); }

  /// Marks [offset, offset+len) poisoned. Throws EncodingError when the
  /// result would leave addressable bytes after a poisoned byte inside one
  /// granule. A granule that ends up fully poisoned takes `kind`. Nothing is
  /// modified on error.
  void poison(std::uint64_t offset, std::uint64_t len, PoisonKind kind);

  /// Marks [offset, offset+len) addressable. `offset` must be granule aligned
  /// (EncodingError otherwise); a trailing partial granule keeps whichever
  /// addressable prefix is longer, its old one or len mod g.
  void unpoison(std::uint64_t offset, std::uint64_t len);

  /// Fills the entire map with one poison kind.
  void poison_all(PoisonKind kind);

  bool is_addressable(std::uint64_t offset) const;

  /// Pure. Returns the first invalid byte of [offset, offset+len), if any.
  /// Ranges leaving the partition report WildAddress at the first byte past
  /// the end of partition memory.
  std::optional<AsanViolation> check_access(std::uint64_t offset, std::uint64_t len,
                                            AccessKind access) const;

 private:
  void require_in_bounds(std::uint64_t offset, std::uint64_t len) const;
  AsanErrorKind kind_at(std::uint64_t granule) const;

  PartitionId partition_;
  std::uint64_t memory_size_;
  std::uint32_t granularity_;
  std::uint32_t shift_;
  std::vector<std::uint8_t> shadow_;
};

// Free-function spellings of the map operations.
inline void poison_region(ShadowMap& map, std::uint64_t offset, std::uint64_t len,
                          PoisonKind kind) {
  map.poison(offset, len, kind);
}
inline void unpoison_region(ShadowMap& map, std::uint64_t offset, std::uint64_t len) {
  map.unpoison(offset, len);
}
inline std::optional<AsanViolation> check_access(const ShadowMap& map, std::uint64_t offset,
                                                 std::uint64_t len, AccessKind access) {
  return map.check_access(offset, len, access);
}

}  // namespace partsan

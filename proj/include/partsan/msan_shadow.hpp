//===-- msan_shadow.hpp - 1:1 initialization shadow ------------*- C++ -*-===//
//
// Tracks, per partition byte, whether it holds a defined value and which
// workload step produced that state. Uninitialized bytes keep the origin of
// the allocation that created them, so a report can point back at it even
// after the bytes were copied elsewhere.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "partsan/common.hpp"

namespace partsan {

using OriginId = std::uint32_t;
inline constexpr OriginId kNoOrigin = 0;

enum class OriginKind : std::uint8_t { Allocation, Declaration, Write, Annotation, Padding };

const char* to_string(OriginKind kind);

struct OriginRecord {
  OriginKind kind = OriginKind::Allocation;
  std::size_t step = 0;

  friend bool operator==(const OriginRecord&, const OriginRecord&) = default;
};

class OriginTable {
 public:
  OriginId add(OriginKind kind, std::size_t step);
  const OriginRecord& at(OriginId id) const;
  std::size_t size() const { return records_.size(); }
  /// "alloc@3" style tag, "none" for kNoOrigin.
  std::string describe(OriginId id) const;

 private:
  std::vector<OriginRecord> records_;
};

/// Program points where reading an uninitialized value is an error.
enum class UseSite : std::uint8_t { SyscallPre, Branch, Arith, PortSend };

const char* to_string(UseSite site);

struct MsanViolation {
  GuestAddr addr;  // lowest uninitialized byte in the checked range
  std::uint64_t requested_len = 0;
  UseSite context = UseSite::Branch;
  OriginId origin = kNoOrigin;

  friend bool operator==(const MsanViolation&, const MsanViolation&) = default;
};

struct ReservedInitConfig {
  bool enabled = false;
  std::uint8_t pattern = 0xCD;
};

struct PaddingRange {
  std::uint64_t offset = 0;
  std::uint64_t len = 0;
};

/// Padding holes per aggregate type, declared by the scenario because the
/// simulator has no C type layouts of its own.
class PaddingRegistry {
 public:
  /// Throws ConfigError when a range exceeds `type_size` or ranges overlap.
  void declare(std::string type_name, std::uint64_t type_size, std::vector<PaddingRange> ranges);
  bool contains(std::string_view type_name) const;
  const std::vector<PaddingRange>& ranges(std::string_view type_name) const;
  std::uint64_t type_size(std::string_view type_name) const;
  bool empty() const { return types_.empty(); }

 private:
  struct Layout {
    std::uint64_t size = 0;
    std::vector<PaddingRange> ranges;
  };
  std::map<std::string, Layout, std::less<>> types_;
};

class InitShadow {
 public:
  InitShadow(PartitionId partition, std::uint64_t size);

  PartitionId partition() const { return partition_; }
  std::uint64_t size() const { return initialized_.size(); }
  bool is_initialized(std::uint64_t offset) const { return initialized_.at(offset) != 0; }
  OriginId origin(std::uint64_t offset) const { return origins_.at(offset); }

  /// Pure. First uninitialized byte of the range, if any.
  std::optional<MsanViolation> check(std::uint64_t offset, std::uint64_t len,
                                     UseSite context) const;

  /// A store of a defined value: bytes become initialized, origin replaced.
  void mark_initialized(std::uint64_t offset, std::uint64_t len, OriginId origin);

  /// Bytes become initialized; bytes that already were keep their origin.
  void unpoison(std::uint64_t offset, std::uint64_t len, OriginId origin);

  /// Bytes become uninitialized and remember `origin` as their source.
  void poison(std::uint64_t offset, std::uint64_t len, OriginId origin);

  void poison_all(OriginId origin);

  /// Marks origins.size() bytes initialized, each with its own origin. Used
  /// when bytes arrive from another partition.
  void assign_initialized(std::uint64_t offset, std::span<const OriginId> origins);

  /// Copies bits and origins from `src`. Overlap within one shadow is fine.
  void copy_from(const InitShadow& src, std::uint64_t src_offset, std::uint64_t dst_offset,
                 std::uint64_t len);

 private:
  void require_in_bounds(std::uint64_t offset, std::uint64_t len) const;

  PartitionId partition_;
  std::vector<std::uint8_t> initialized_;
  std::vector<OriginId> origins_;
};

// Contract primitives, named as the annotation language spells them.

inline std::optional<MsanViolation> msan_check(const InitShadow& shadow, std::uint64_t offset,
                                               std::uint64_t len, UseSite context) {
  return shadow.check(offset, len, context);
}

inline void msan_unpoison(InitShadow& shadow, std::uint64_t offset, std::uint64_t len,
                          OriginId origin) {
  shadow.unpoison(offset, len, origin);
}

/// Copying is not a use: no violation is raised whatever the source state.
inline void copy_propagate(const InitShadow& src, std::uint64_t src_offset, InitShadow& dst,
                           std::uint64_t dst_offset, std::uint64_t len) {
  dst.copy_from(src, src_offset, dst_offset, len);
}

/// Throws ConfigError for a type the registry does not know.
void unpoison_padding(InitShadow& shadow, const PaddingRegistry& registry,
                      std::string_view type_name, std::uint64_t base, OriginId origin);

}  // namespace partsan

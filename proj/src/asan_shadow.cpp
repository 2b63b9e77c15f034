//===-- asan_shadow.cpp - Address-validity shadow map ----------------------===//

#include "partsan/asan_shadow.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace partsan {

const char* to_string(AsanErrorKind kind) {
  switch (kind) {
    case AsanErrorKind::LeftRedzone: return "LEFT_REDZONE";
    case AsanErrorKind::RightRedzone: return "RIGHT_REDZONE";
    case AsanErrorKind::PartitionReset: return "PARTITION_RESET";
    case AsanErrorKind::ManualBlacklist: return "MANUAL_BLACKLIST";
    case AsanErrorKind::WildAddress: return "WILD_ADDRESS";
  }
  return "UNKNOWN";
}

AsanErrorKind error_kind_for(PoisonKind kind) {
  switch (kind) {
    case PoisonKind::LeftRedzone: return AsanErrorKind::LeftRedzone;
    case PoisonKind::RightRedzone: return AsanErrorKind::RightRedzone;
    case PoisonKind::PartitionReset: return AsanErrorKind::PartitionReset;
    case PoisonKind::ManualBlacklist: return AsanErrorKind::ManualBlacklist;
  }
  return AsanErrorKind::ManualBlacklist;
}

std::optional<PoisonKind> poison_kind_from_code(std::uint8_t code) {
  switch (code) {
    case 0xF1: return PoisonKind::LeftRedzone;
    case 0xF3: return PoisonKind::RightRedzone;
    case 0xF8: return PoisonKind::PartitionReset;
    case 0xFE: return PoisonKind::ManualBlacklist;
    default: return std::nullopt;
  }
}

bool is_valid_granularity(std::uint32_t granularity) {
  return granularity >= 1 && granularity <= 16 && std::has_single_bit(granularity);
}

std::uint64_t shadow_size_for(std::uint64_t memory_size, std::uint32_t granularity) {
  if (!is_valid_granularity(granularity))
    throw ConfigError("granularity must be one of 1, 2, 4, 8, 16 (got " +
                      std::to_string(granularity) + ")");
  if (memory_size % granularity != 0)
    throw ConfigError("memory size " + std::to_string(memory_size) +
                      " is not a multiple of granularity " + std::to_string(granularity));
  return memory_size / granularity;
}

namespace {

// Number of leading addressable bytes encoded by one shadow byte.
std::uint32_t addressable_prefix(std::uint8_t shadow, std::uint32_t granularity) {
  if (shadow == 0) return granularity;
  if (shadow >= kFirstPoisonCode) return 0;
  return shadow;
}

}  // namespace

ShadowMap::ShadowMap(PartitionId partition, std::uint64_t memory_size,
                     std::uint32_t granularity, PoisonKind initial)
    : partition_(partition),
      memory_size_(memory_size),
      granularity_(granularity),
      shift_(static_cast<std::uint32_t>(std::countr_zero(granularity))),
      shadow_(shadow_size_for(memory_size, granularity), static_cast<std::uint8_t>(initial)) {}

void ShadowMap::require_in_bounds(std::uint64_t offset, std::uint64_t len) const {
  if (offset > memory_size_ || len > memory_size_ - offset)
    throw std::out_of_range("shadow range [" + std::to_string(offset) + ", +" +
                            std::to_string(len) + ") outside partition of " +
                            std::to_string(memory_size_) + " bytes");
}

void ShadowMap::poison(std::uint64_t offset, std::uint64_t len, PoisonKind kind) {
  if (len == 0) return;
  require_in_bounds(offset, len);
  const std::uint64_t end = offset + len;
  const std::uint64_t first = offset >> shift_;
  const std::uint64_t last = (end - 1) >> shift_;

  // Validate every touched granule before writing anything.
  std::vector<std::uint8_t> updated;
  updated.reserve(last - first + 1);
  for (std::uint64_t gi = first; gi <= last; ++gi) {
    const std::uint64_t gstart = gi << shift_;
    const std::uint32_t lo = static_cast<std::uint32_t>(std::max(offset, gstart) - gstart);
    const std::uint32_t hi =
        static_cast<std::uint32_t>(std::min(end, gstart + granularity_) - gstart);
    const std::uint8_t current = shadow_[gi];
    const std::uint32_t prefix = addressable_prefix(current, granularity_);

    std::uint32_t new_prefix = prefix;
    if (lo < prefix) {
      if (hi < prefix)
        throw EncodingError("poisoning [" + std::to_string(gstart + lo) + ", " +
                            std::to_string(gstart + hi) +
                            ") would leave an interior addressable hole");
      new_prefix = lo;
    }
    if (new_prefix == 0)  // the latest poison names the granule's kind
      updated.push_back(static_cast<std::uint8_t>(kind));
    else if (new_prefix == granularity_)
      updated.push_back(0);
    else
      updated.push_back(static_cast<std::uint8_t>(new_prefix));
  }
  std::copy(updated.begin(), updated.end(), shadow_.begin() + static_cast<std::ptrdiff_t>(first));
}

void ShadowMap::unpoison(std::uint64_t offset, std::uint64_t len) {
  if (offset % granularity_ != 0)
    throw EncodingError("unpoison start " + std::to_string(offset) +
                        " is not aligned to granularity " + std::to_string(granularity_));
  if (len == 0) return;
  require_in_bounds(offset, len);
  const std::uint64_t first = offset >> shift_;
  const std::uint64_t full = len >> shift_;
  std::fill_n(shadow_.begin() + static_cast<std::ptrdiff_t>(first), full, std::uint8_t{0});
  if (const auto tail = len & (granularity_ - 1); tail != 0) {
    std::uint8_t& s = shadow_[first + full];
    const auto prefix = std::max<std::uint32_t>(addressable_prefix(s, granularity_),
                                                static_cast<std::uint32_t>(tail));
    s = prefix == granularity_ ? 0 : static_cast<std::uint8_t>(prefix);
  }
}

void ShadowMap::poison_all(PoisonKind kind) {
  std::fill(shadow_.begin(), shadow_.end(), static_cast<std::uint8_t>(kind));
}

bool ShadowMap::is_addressable(std::uint64_t offset) const {
  if (offset >= memory_size_) return false;
  const std::uint8_t s = shadow_[offset >> shift_];
  return (offset & (granularity_ - 1)) < addressable_prefix(s, granularity_);
}

AsanErrorKind ShadowMap::kind_at(std::uint64_t granule) const {
  std::uint8_t s = shadow_[granule];
  // A partial granule carries no kind of its own; borrow the neighbour's,
  // the way ASan classifies an overflow past an unaligned object end.
  if (s < kFirstPoisonCode) {
    if (granule + 1 >= shadow_.size()) return AsanErrorKind::RightRedzone;
    s = shadow_[granule + 1];
  }
  if (auto kind = poison_kind_from_code(s)) return error_kind_for(*kind);
  return AsanErrorKind::RightRedzone;
}

std::optional<AsanViolation> ShadowMap::check_access(std::uint64_t offset, std::uint64_t len,
                                                     AccessKind access) const {
  if (len == 0) throw std::invalid_argument("check_access requires len >= 1");
  if (offset >= memory_size_ || len > memory_size_ - offset) {
    return AsanViolation{AsanErrorKind::WildAddress,
                         GuestAddr{partition_, std::max(offset, memory_size_)}, access, len, {}};
  }
  const std::uint64_t end = offset + len;
  for (std::uint64_t gi = offset >> shift_, last = (end - 1) >> shift_; gi <= last; ++gi) {
    const std::uint8_t s = shadow_[gi];
    if (s == 0) continue;
    const std::uint64_t gstart = gi << shift_;
    const std::uint64_t valid_end = gstart + addressable_prefix(s, granularity_);
    const std::uint64_t hi = std::min(end, gstart + granularity_);
    if (hi <= valid_end) continue;
    const std::uint64_t bad = std::max(offset, valid_end);
    return AsanViolation{kind_at(gi), GuestAddr{partition_, bad}, access, len, {}};
  }
  return std::nullopt;
}

}  // namespace partsan

//===-- guest_memory.cpp - Partition memory with redzoned regions ----------===//

#include "partsan/guest_memory.hpp"

#include <algorithm>
#include <stdexcept>

namespace partsan {
namespace {

std::uint64_t round_up(std::uint64_t value, std::uint64_t align) {
  return (value + align - 1) / align * align;
}

std::uint64_t validated_size(std::uint64_t size_bytes, const MemoryOptions& options) {
  if (size_bytes == 0) throw ConfigError("partition memory size must be positive");
  shadow_size_for(size_bytes, options.granularity);  // throws on misalignment
  if (options.redzone == 0) throw ConfigError("redzone size must be positive");
  return size_bytes;
}

}  // namespace

PartitionMemory::PartitionMemory(PartitionId partition, std::uint64_t size_bytes,
                                 MemoryOptions options)
    : partition_(partition),
      options_(options),
      bytes_(validated_size(size_bytes, options), 0),
      shadow_(partition, size_bytes, options.granularity, PoisonKind::ManualBlacklist),
      init_(partition, size_bytes),
      cursor_(round_up(kNullGuardBytes, options.granularity)) {}

void PartitionMemory::start() { phase_ = MemoryPhase::Running; }

Region PartitionMemory::alloc_region(std::uint64_t payload_len, std::string label,
                                     OriginId origin) {
  if (phase_ != MemoryPhase::Init)
    throw PhaseError("region '" + label + "' allocated after partition start");
  if (payload_len == 0) throw ConfigError("region '" + label + "' has zero length");

  const std::uint64_t g = options_.granularity;
  const std::uint64_t redzone = std::max<std::uint64_t>(options_.redzone, g);
  const std::uint64_t left = round_up(redzone, g);
  const std::uint64_t base = cursor_ + left;
  const std::uint64_t payload_end = base + payload_len;
  const std::uint64_t span_end = round_up(payload_end + redzone, g);
  if (payload_len > size() || span_end > size() || base > size() - payload_len)
    throw OutOfMemory("partition " + std::to_string(partition_) + " cannot fit region '" +
                      label + "' of " + std::to_string(payload_len) + " bytes");

  shadow_.poison(cursor_, left, PoisonKind::LeftRedzone);
  shadow_.unpoison(base, payload_len);
  const std::uint64_t right_start = round_up(payload_end, g);
  shadow_.poison(right_start, span_end - right_start, PoisonKind::RightRedzone);
  init_.poison(base, payload_len, origin);

  cursor_ = span_end;
  regions_.push_back(Region{GuestAddr{partition_, base}, payload_len, left,
                            span_end - payload_end, std::move(label)});
  return regions_.back();
}

std::optional<AsanViolation> PartitionMemory::check(std::uint64_t offset, std::uint64_t len,
                                                    AccessKind access) const {
  auto violation = shadow_.check_access(offset, len, access);
  if (violation) {
    if (const Region* region = nearest_region(violation->addr.offset))
      violation->region_label = region->label;
  }
  return violation;
}

std::optional<AsanViolation> PartitionMemory::checked_read(std::uint64_t offset,
                                                           std::span<std::uint8_t> out) const {
  if (out.empty()) throw std::invalid_argument("checked_read requires len >= 1");
  if (auto violation = check(offset, out.size(), AccessKind::Read)) return violation;
  std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(offset), out.size(), out.begin());
  return std::nullopt;
}

std::optional<AsanViolation> PartitionMemory::checked_write(std::uint64_t offset,
                                                            std::span<const std::uint8_t> bytes,
                                                            OriginId origin) {
  if (bytes.empty()) throw std::invalid_argument("checked_write requires at least one byte");
  if (auto violation = check(offset, bytes.size(), AccessKind::Write)) return violation;
  std::copy(bytes.begin(), bytes.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(offset));
  const auto& reserved = options_.reserved_init;
  const bool reserved_fill =
      reserved.enabled && std::all_of(bytes.begin(), bytes.end(),
                                      [&](std::uint8_t b) { return b == reserved.pattern; });
  if (!reserved_fill) init_.mark_initialized(offset, bytes.size(), origin);
  return std::nullopt;
}

void PartitionMemory::reset() {
  phase_ = MemoryPhase::Init;
  regions_.clear();
  cursor_ = round_up(kNullGuardBytes, options_.granularity);
  shadow_.poison_all(PoisonKind::PartitionReset);
  init_.poison_all(kNoOrigin);
}

void PartitionMemory::raw_store(std::uint64_t offset, std::span<const std::uint8_t> bytes) {
  if (offset > size() || bytes.size() > size() - offset)
    throw std::out_of_range("raw store outside partition memory");
  std::copy(bytes.begin(), bytes.end(), bytes_.begin() + static_cast<std::ptrdiff_t>(offset));
}

const Region* PartitionMemory::nearest_region(std::uint64_t offset) const {
  const Region* best = nullptr;
  std::uint64_t best_distance = 0;
  for (const auto& region : regions_) {
    std::uint64_t distance = 0;
    if (offset < region.span_begin())
      distance = region.span_begin() - offset;
    else if (offset >= region.span_end())
      distance = offset - region.span_end() + 1;
    if (!best || distance < best_distance) {
      best = &region;
      best_distance = distance;
    }
  }
  return best;
}

}  // namespace partsan

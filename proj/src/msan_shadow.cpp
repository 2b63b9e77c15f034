//===-- msan_shadow.cpp - 1:1 initialization shadow ------------------------===//

#include "partsan/msan_shadow.hpp"

#include <algorithm>
#include <stdexcept>

namespace partsan {

const char* to_string(OriginKind kind) {
  switch (kind) {
    case OriginKind::Allocation: return "alloc";
    case OriginKind::Declaration: return "decl";
    case OriginKind::Write: return "write";
    case OriginKind::Annotation: return "annotation";
    case OriginKind::Padding: return "padding";
  }
  return "unknown";
}

const char* to_string(UseSite site) {
  switch (site) {
    case UseSite::SyscallPre: return "SYSCALL_PRE";
    case UseSite::Branch: return "BRANCH";
    case UseSite::Arith: return "ARITH";
    case UseSite::PortSend: return "PORT_SEND";
  }
  return "UNKNOWN";
}

OriginId OriginTable::add(OriginKind kind, std::size_t step) {
  records_.push_back(OriginRecord{kind, step});
  return static_cast<OriginId>(records_.size());
}

const OriginRecord& OriginTable::at(OriginId id) const {
  if (id == kNoOrigin || id > records_.size())
    throw std::out_of_range("unknown origin id " + std::to_string(id));
  return records_[id - 1];
}

std::string OriginTable::describe(OriginId id) const {
  if (id == kNoOrigin || id > records_.size()) return "none";
  const auto& rec = records_[id - 1];
  return std::string(to_string(rec.kind)) + "@" + std::to_string(rec.step);
}

void PaddingRegistry::declare(std::string type_name, std::uint64_t type_size,
                              std::vector<PaddingRange> ranges) {
  if (type_size == 0) throw ConfigError("type '" + type_name + "' has zero size");
  std::sort(ranges.begin(), ranges.end(),
            [](const PaddingRange& a, const PaddingRange& b) { return a.offset < b.offset; });
  std::uint64_t covered = 0;
  for (const auto& r : ranges) {
    if (r.len == 0 || r.offset > type_size || r.len > type_size - r.offset)
      throw ConfigError("padding range (" + std::to_string(r.offset) + ", " +
                        std::to_string(r.len) + ") outside type '" + type_name + "'");
    if (r.offset < covered)
      throw ConfigError("overlapping padding ranges in type '" + type_name + "'");
    covered = r.offset + r.len;
  }
  types_[std::move(type_name)] = Layout{type_size, std::move(ranges)};
}

bool PaddingRegistry::contains(std::string_view type_name) const {
  return types_.find(type_name) != types_.end();
}

const std::vector<PaddingRange>& PaddingRegistry::ranges(std::string_view type_name) const {
  auto it = types_.find(type_name);
  if (it == types_.end()) throw ConfigError("unknown padded type '" + std::string(type_name) + "'");
  return it->second.ranges;
}

std::uint64_t PaddingRegistry::type_size(std::string_view type_name) const {
  auto it = types_.find(type_name);
  if (it == types_.end()) throw ConfigError("unknown padded type '" + std::string(type_name) + "'");
  return it->second.size;
}

InitShadow::InitShadow(PartitionId partition, std::uint64_t size)
    : partition_(partition), initialized_(size, 0), origins_(size, kNoOrigin) {}

void InitShadow::require_in_bounds(std::uint64_t offset, std::uint64_t len) const {
  if (offset > size() || len > size() - offset)
    throw std::out_of_range("init shadow range [" + std::to_string(offset) + ", +" +
                            std::to_string(len) + ") outside partition of " +
                            std::to_string(size()) + " bytes");
}

std::optional<MsanViolation> InitShadow::check(std::uint64_t offset, std::uint64_t len,
                                               UseSite context) const {
  require_in_bounds(offset, len);
  const auto first = initialized_.begin() + static_cast<std::ptrdiff_t>(offset);
  const auto it = std::find(first, first + static_cast<std::ptrdiff_t>(len), std::uint8_t{0});
  if (it == first + static_cast<std::ptrdiff_t>(len)) return std::nullopt;
  const auto bad = static_cast<std::uint64_t>(it - initialized_.begin());
  return MsanViolation{GuestAddr{partition_, bad}, len, context, origins_[bad]};
}

void InitShadow::mark_initialized(std::uint64_t offset, std::uint64_t len, OriginId origin) {
  require_in_bounds(offset, len);
  std::fill_n(initialized_.begin() + static_cast<std::ptrdiff_t>(offset), len, std::uint8_t{1});
  std::fill_n(origins_.begin() + static_cast<std::ptrdiff_t>(offset), len, origin);
}

void InitShadow::unpoison(std::uint64_t offset, std::uint64_t len, OriginId origin) {
  require_in_bounds(offset, len);
  for (std::uint64_t i = offset; i < offset + len; ++i) {
    if (initialized_[i]) continue;
    initialized_[i] = 1;
    origins_[i] = origin;
  }
}

void InitShadow::poison(std::uint64_t offset, std::uint64_t len, OriginId origin) {
  require_in_bounds(offset, len);
  std::fill_n(initialized_.begin() + static_cast<std::ptrdiff_t>(offset), len, std::uint8_t{0});
  std::fill_n(origins_.begin() + static_cast<std::ptrdiff_t>(offset), len, origin);
}

void InitShadow::assign_initialized(std::uint64_t offset, std::span<const OriginId> origins) {
  require_in_bounds(offset, origins.size());
  std::fill_n(initialized_.begin() + static_cast<std::ptrdiff_t>(offset), origins.size(),
              std::uint8_t{1});
  std::copy(origins.begin(), origins.end(), origins_.begin() + static_cast<std::ptrdiff_t>(offset));
}

void InitShadow::poison_all(OriginId origin) { poison(0, size(), origin); }

void InitShadow::copy_from(const InitShadow& src, std::uint64_t src_offset,
                           std::uint64_t dst_offset, std::uint64_t len) {
  src.require_in_bounds(src_offset, len);
  require_in_bounds(dst_offset, len);
  const auto s = static_cast<std::ptrdiff_t>(src_offset);
  const auto n = static_cast<std::ptrdiff_t>(len);
  // Stage through temporaries so overlapping ranges in one shadow behave
  // like memmove.
  std::vector<std::uint8_t> bits(src.initialized_.begin() + s, src.initialized_.begin() + s + n);
  std::vector<OriginId> origins(src.origins_.begin() + s, src.origins_.begin() + s + n);
  std::copy(bits.begin(), bits.end(), initialized_.begin() + static_cast<std::ptrdiff_t>(dst_offset));
  std::copy(origins.begin(), origins.end(), origins_.begin() + static_cast<std::ptrdiff_t>(dst_offset));
}

void unpoison_padding(InitShadow& shadow, const PaddingRegistry& registry,
                      std::string_view type_name, std::uint64_t base, OriginId origin) {
  for (const auto& range : registry.ranges(type_name))
    shadow.unpoison(base + range.offset, range.len, origin);
}

}  // namespace partsan

//===-- ports.cpp - Sampling and queueing ports ----------------------------===//

#include "partsan/ports.hpp"

#include <stdexcept>

namespace partsan {

const char* to_string(PortErrorKind kind) {
  switch (kind) {
    case PortErrorKind::MessageTooLong: return "MESSAGE_TOO_LONG";
    case PortErrorKind::QueueFull: return "QUEUE_FULL";
    case PortErrorKind::Empty: return "PORT_EMPTY";
    case PortErrorKind::WrongDirection: return "PORT_DIRECTION";
  }
  return "UNKNOWN";
}

const char* to_string(Validity validity) {
  return validity == Validity::Valid ? "VALID" : "STALE";
}

namespace {

// Source-side checks shared by both port kinds: size, addressability, then
// initialization of every byte about to leave the partition.
std::variant<Message, PortFault> capture(const PartitionMemory& src, std::uint64_t offset,
                                         std::uint64_t len, Tick now, const std::string& name,
                                         PartitionId source, std::uint64_t max_size,
                                         PortCheckCounts* counts) {
  if (src.partition() != source)
    return PortFault{PortError{PortErrorKind::WrongDirection, name, len}};
  if (len == 0) throw std::invalid_argument("port message must not be empty");
  if (len > max_size) return PortFault{PortError{PortErrorKind::MessageTooLong, name, len}};

  Message message;
  message.bytes.resize(len);
  if (counts) ++counts->asan;
  if (auto violation = src.checked_read(offset, message.bytes)) return PortFault{*violation};
  if (counts) ++counts->msan;
  if (auto violation = msan_check(src.init_shadow(), offset, len, UseSite::PortSend))
    return PortFault{*violation};

  message.origins.reserve(len);
  for (std::uint64_t i = 0; i < len; ++i) message.origins.push_back(src.init_shadow().origin(offset + i));
  message.send_time = now;
  message.source_partition = src.partition();
  return message;
}

std::optional<PortFault> deliver(PartitionMemory& dst, std::uint64_t offset, const Message& message,
                                 PortCheckCounts* counts) {
  if (counts) ++counts->asan;
  if (auto violation = dst.shadow().check_access(offset, message.bytes.size(), AccessKind::Write)) {
    if (const Region* region = dst.nearest_region(violation->addr.offset))
      violation->region_label = region->label;
    return PortFault{*violation};
  }
  dst.raw_store(offset, message.bytes);
  dst.init_shadow().assign_initialized(offset, message.origins);
  return std::nullopt;
}

}  // namespace

SamplingPort::SamplingPort(SamplingPortConfig config) : config_(std::move(config)) {
  if (config_.max_message_size == 0)
    throw ConfigError("sampling port '" + config_.name + "' needs a positive max message size");
}

std::optional<PortFault> SamplingPort::write(const PartitionMemory& src, std::uint64_t offset,
                                             std::uint64_t len, Tick now,
                                             PortCheckCounts* counts) {
  auto captured = capture(src, offset, len, now, config_.name, config_.source,
                          config_.max_message_size, counts);
  if (auto* fault = std::get_if<PortFault>(&captured)) return *fault;
  latest_ = std::move(std::get<Message>(captured));
  return std::nullopt;
}

std::variant<SampledMessage, PortFault> SamplingPort::read(PartitionMemory& dst,
                                                           std::uint64_t offset, Tick now,
                                                           PortCheckCounts* counts) {
  if (dst.partition() != config_.destination)
    return PortFault{PortError{PortErrorKind::WrongDirection, config_.name, 0}};
  if (!latest_) return PortFault{PortError{PortErrorKind::Empty, config_.name, 0}};
  if (auto fault = deliver(dst, offset, *latest_, counts)) return *fault;
  const Tick age = now - std::min(now, latest_->send_time);
  return SampledMessage{latest_->bytes,
                        age <= config_.refresh_period ? Validity::Valid : Validity::Stale};
}

QueueingPort::QueueingPort(QueueingPortConfig config) : config_(std::move(config)) {
  if (config_.max_message_size == 0)
    throw ConfigError("queueing port '" + config_.name + "' needs a positive max message size");
  if (config_.capacity == 0)
    throw ConfigError("queueing port '" + config_.name + "' needs a positive capacity");
}

std::optional<PortFault> QueueingPort::send(const PartitionMemory& src, std::uint64_t offset,
                                            std::uint64_t len, Tick now,
                                            PortCheckCounts* counts) {
  auto captured = capture(src, offset, len, now, config_.name, config_.source,
                          config_.max_message_size, counts);
  if (auto* fault = std::get_if<PortFault>(&captured)) return *fault;
  if (queue_.size() >= config_.capacity)
    return PortFault{PortError{PortErrorKind::QueueFull, config_.name, len}};
  queue_.push_back(std::move(std::get<Message>(captured)));
  return std::nullopt;
}

std::variant<ReceivedMessage, PortFault> QueueingPort::receive(PartitionMemory& dst,
                                                               std::uint64_t offset,
                                                               PortCheckCounts* counts) {
  if (dst.partition() != config_.destination)
    return PortFault{PortError{PortErrorKind::WrongDirection, config_.name, 0}};
  if (queue_.empty()) return PortFault{PortError{PortErrorKind::Empty, config_.name, 0}};
  if (auto fault = deliver(dst, offset, queue_.front(), counts)) return *fault;
  ReceivedMessage received{std::move(queue_.front().bytes), queue_.front().send_time};
  queue_.pop_front();
  return received;
}

}  // namespace partsan

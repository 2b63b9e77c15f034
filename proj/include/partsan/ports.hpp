//===-- ports.hpp - Sampling and queueing ports ----------------*- C++ -*-===//
//
// Inter-partition channels. Sending checks that the source bytes are both
// addressable and fully initialized, so no undefined byte ever leaves a
// partition. Delivered bytes carry the origins they had at the sender.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "partsan/common.hpp"
#include "partsan/guest_memory.hpp"

namespace partsan {

enum class PortErrorKind : std::uint8_t { MessageTooLong, QueueFull, Empty, WrongDirection };

const char* to_string(PortErrorKind kind);

struct PortError {
  PortErrorKind kind = PortErrorKind::Empty;
  std::string port;
  std::uint64_t len = 0;

  friend bool operator==(const PortError&, const PortError&) = default;
};

using PortFault = std::variant<AsanViolation, MsanViolation, PortError>;

struct Message {
  std::vector<std::uint8_t> bytes;
  std::vector<OriginId> origins;  // per byte, as recorded at the sender
  Tick send_time = 0;
  PartitionId source_partition = 0;
};

enum class Validity : std::uint8_t { Valid, Stale };

const char* to_string(Validity validity);

struct SampledMessage {
  std::vector<std::uint8_t> bytes;
  Validity validity = Validity::Valid;
};

struct ReceivedMessage {
  std::vector<std::uint8_t> bytes;
  Tick send_time = 0;
};

struct SamplingPortConfig {
  std::string name;
  PartitionId source = 0;
  PartitionId destination = 0;
  std::uint64_t max_message_size = 0;
  Tick refresh_period = 0;
};

struct QueueingPortConfig {
  std::string name;
  PartitionId source = 0;
  PartitionId destination = 0;
  std::uint64_t max_message_size = 0;
  std::size_t capacity = 0;
};

/// Counts of checks performed by one port operation, for the time model.
struct PortCheckCounts {
  std::uint64_t asan = 0;
  std::uint64_t msan = 0;
};

class SamplingPort {
 public:
  explicit SamplingPort(SamplingPortConfig config);

  const SamplingPortConfig& config() const { return config_; }
  const std::optional<Message>& latest() const { return latest_; }

  /// Overwrites the stored message on success; leaves it untouched on any fault.
  std::optional<PortFault> write(const PartitionMemory& src, std::uint64_t offset,
                                 std::uint64_t len, Tick now, PortCheckCounts* counts = nullptr);

  /// Copies the latest message to `offset` in `dst`. VALID while the
  /// message age is at most refresh_period.
  std::variant<SampledMessage, PortFault> read(PartitionMemory& dst, std::uint64_t offset,
                                               Tick now, PortCheckCounts* counts = nullptr);

 private:
  SamplingPortConfig config_;
  std::optional<Message> latest_;
};

class QueueingPort {
 public:
  explicit QueueingPort(QueueingPortConfig config);

  const QueueingPortConfig& config() const { return config_; }
  std::size_t depth() const { return queue_.size(); }

  /// A full queue drops the new message and reports QueueFull.
  std::optional<PortFault> send(const PartitionMemory& src, std::uint64_t offset,
                                std::uint64_t len, Tick now, PortCheckCounts* counts = nullptr);

  std::variant<ReceivedMessage, PortFault> receive(PartitionMemory& dst, std::uint64_t offset,
                                                   PortCheckCounts* counts = nullptr);

 private:
  QueueingPortConfig config_;
  std::deque<Message> queue_;
};

// Operation names as used in the scenario workload.

inline std::optional<PortFault> write_sampling(SamplingPort& port, const PartitionMemory& src,
                                               std::uint64_t offset, std::uint64_t len, Tick now) {
  return port.write(src, offset, len, now);
}
inline std::variant<SampledMessage, PortFault> read_sampling(SamplingPort& port,
                                                             PartitionMemory& dst,
                                                             std::uint64_t offset, Tick now) {
  return port.read(dst, offset, now);
}
inline std::optional<PortFault> send_queueing(QueueingPort& port, const PartitionMemory& src,
                                              std::uint64_t offset, std::uint64_t len, Tick now) {
  return port.send(src, offset, len, now);
}
inline std::variant<ReceivedMessage, PortFault> receive_queueing(QueueingPort& port,
                                                                 PartitionMemory& dst,
                                                                 std::uint64_t offset) {
  return port.receive(dst, offset);
}

}  // namespace partsan

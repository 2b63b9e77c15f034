//===-- common.hpp - Shared identifiers and error types --------*- C++ -*-===//
//
// Identifiers used by every simulator module, the guest address type, and the
// exception hierarchy for configuration and contract errors. Sanitizer
// findings are never exceptions; they are returned as values.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace partsan {

using PartitionId = std::uint32_t;
using ProcessId = std::uint32_t;
using Tick = std::uint64_t;

/// A byte position inside one partition's statically allocated memory.
struct GuestAddr {
  PartitionId partition = 0;
  std::uint64_t offset = 0;

  friend bool operator==(const GuestAddr&, const GuestAddr&) = default;
};

enum class AccessKind : std::uint8_t { Read, Write };

inline const char* access_letter(AccessKind kind) {
  return kind == AccessKind::Read ? "R" : "W";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration. `pointer` is a JSON pointer into the scenario file
/// when the error came from the loader, empty otherwise.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string pointer = {})
      : Error(pointer.empty() ? message : pointer + ": " + message),
        pointer_(std::move(pointer)) {}

  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Region allocation attempted after the partition left its INIT phase.
class PhaseError : public Error {
 public:
  using Error::Error;
};

class OutOfMemory : public Error {
 public:
  using Error::Error;
};

/// A shadow update that the leading-bytes encoding cannot represent.
class EncodingError : public Error {
 public:
  using Error::Error;
};

}  // namespace partsan

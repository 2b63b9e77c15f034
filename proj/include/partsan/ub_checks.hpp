//===-- ub_checks.hpp - Checked primitives for undefined behavior -*- C++ -*-===//
//
// Integer overflow, division, shift, truncation, alignment, null and
// bool/enum range checks. Operand values are carried as 128-bit integers so
// every 64-bit signed and unsigned value fits; the IntSpec says how to read them.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "partsan/common.hpp"

namespace partsan {

__extension__ typedef __int128 wide_int;

std::string to_string(wide_int value);

struct IntSpec {
  std::uint8_t width = 32;  // 8, 16, 32 or 64
  bool is_signed = true;

  wide_int min() const;
  wide_int max() const;
  bool contains(wide_int value) const { return value >= min() && value <= max(); }

  /// "i32", "u8", ...; throws ConfigError for anything else.
  static IntSpec parse(std::string_view text);
  std::string name() const;

  friend bool operator==(const IntSpec&, const IntSpec&) = default;
};

struct EnumSpec {
  std::string name;
  std::set<std::int64_t> allowed;  // must be non-empty
};

enum class UbKind : std::uint8_t {
  AddOverflow,
  SubOverflow,
  MulOverflow,
  DivByZero,
  DivOverflow,
  ShiftRange,
  Misaligned,
  NullDeref,
  BoolRange,
  EnumRange,
  Truncation,
};

const char* to_string(UbKind kind);

struct UbViolation {
  UbKind kind = UbKind::AddOverflow;
  wide_int lhs = 0;
  wide_int rhs = 0;
  std::optional<IntSpec> spec;     // operand type, when there is one
  std::optional<IntSpec> to_spec;  // truncation target

  friend bool operator==(const UbViolation&, const UbViolation&) = default;
};

enum class ArithOp : std::uint8_t { Add, Sub, Mul };

const char* to_string(ArithOp op);
ArithOp parse_arith_op(std::string_view text);

struct UbOptions {
  /// Flag unsigned wraparound and shifted-out unsigned bits as well.
  bool strict_unsigned = false;
};

using UbResult = std::variant<wide_int, UbViolation>;

// Operands must be representable in their spec; std::domain_error otherwise.

UbResult checked_arith(ArithOp op, wide_int a, wide_int b, IntSpec spec, UbOptions options = {});

/// Quotient truncated toward zero.
UbResult checked_div(wide_int a, wide_int b, IntSpec spec, UbOptions options = {});

/// Left shift. Shift counts outside [0, width) always fail; for signed specs
/// the result must equal a * 2^s.
UbResult checked_shift(wide_int a, wide_int shift, IntSpec spec, UbOptions options = {});

UbResult checked_trunc(wide_int a, IntSpec from, IntSpec to);

/// Float to integer conversion; overflow and NaN report Truncation.
UbResult checked_float_to_int(double value, IntSpec to);

/// `align` must be a power of two (ConfigError otherwise).
std::optional<UbViolation> check_align(std::uint64_t offset, std::uint64_t align);

/// Guest null is partition offset 0.
std::optional<UbViolation> check_nonnull(std::uint64_t offset);

std::optional<UbViolation> check_bool(wide_int value);

std::optional<UbViolation> check_enum(wide_int value, const EnumSpec& spec);

}  // namespace partsan

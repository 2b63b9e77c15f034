//===-- ub_checks.cpp - Checked primitives for undefined behavior ----------===//
//
// Each check runs on the native C++ type the IntSpec names, using the compiler's
// overflow builtins. The tests compare against plain 128-bit arithmetic.
//
//===----------------------------------------------------------------------===//

#include "partsan/ub_checks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace partsan {

std::string to_string(wide_int value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  // Work on the magnitude as unsigned so the minimum value is handled too.
  unsigned __int128 magnitude =
      negative ? static_cast<unsigned __int128>(-(value + 1)) + 1 : static_cast<unsigned __int128>(value);
  std::string digits;
  while (magnitude != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(magnitude % 10)));
    magnitude /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

wide_int IntSpec::min() const {
  if (!is_signed) return 0;
  return -(static_cast<wide_int>(1) << (width - 1));
}

wide_int IntSpec::max() const {
  if (!is_signed) return (static_cast<wide_int>(1) << width) - 1;
  return (static_cast<wide_int>(1) << (width - 1)) - 1;
}

IntSpec IntSpec::parse(std::string_view text) {
  if (text.size() >= 2 && (text[0] == 'i' || text[0] == 'u')) {
    const auto bits = text.substr(1);
    for (std::uint8_t width : {8, 16, 32, 64}) {
      if (bits == std::to_string(width)) return IntSpec{width, text[0] == 'i'};
    }
  }
  throw ConfigError("unknown integer type '" + std::string(text) + "'");
}

std::string IntSpec::name() const {
  return (is_signed ? "i" : "u") + std::to_string(width);
}

const char* to_string(UbKind kind) {
  switch (kind) {
    case UbKind::AddOverflow: return "ADD_OVERFLOW";
    case UbKind::SubOverflow: return "SUB_OVERFLOW";
    case UbKind::MulOverflow: return "MUL_OVERFLOW";
    case UbKind::DivByZero: return "DIV_BY_ZERO";
    case UbKind::DivOverflow: return "DIV_OVERFLOW";
    case UbKind::ShiftRange: return "SHIFT_RANGE";
    case UbKind::Misaligned: return "MISALIGNED";
    case UbKind::NullDeref: return "NULL_DEREF";
    case UbKind::BoolRange: return "BOOL_RANGE";
    case UbKind::EnumRange: return "ENUM_RANGE";
    case UbKind::Truncation: return "TRUNCATION";
  }
  return "UNKNOWN";
}

const char* to_string(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "ADD";
    case ArithOp::Sub: return "SUB";
    case ArithOp::Mul: return "MUL";
  }
  return "UNKNOWN";
}

ArithOp parse_arith_op(std::string_view text) {
  if (text == "ADD") return ArithOp::Add;
  if (text == "SUB") return ArithOp::Sub;
  if (text == "MUL") return ArithOp::Mul;
  throw ConfigError("unknown arithmetic op '" + std::string(text) + "'");
}

namespace {

// Calls fn with a value-initialized object of the native type for `spec`.
template <typename Fn>
decltype(auto) with_native_type(IntSpec spec, Fn&& fn) {
  switch (spec.width) {
    case 8: return spec.is_signed ? fn(std::int8_t{}) : fn(std::uint8_t{});
    case 16: return spec.is_signed ? fn(std::int16_t{}) : fn(std::uint16_t{});
    case 32: return spec.is_signed ? fn(std::int32_t{}) : fn(std::uint32_t{});
    case 64: return spec.is_signed ? fn(std::int64_t{}) : fn(std::uint64_t{});
    default: throw ConfigError("unsupported integer width " + std::to_string(spec.width));
  }
}

void require_representable(wide_int value, IntSpec spec, const char* what) {
  if (!spec.contains(value))
    throw std::domain_error(std::string(what) + " " + to_string(value) +
                            " is not representable in " + spec.name());
}

UbViolation violation(UbKind kind, wide_int lhs, wide_int rhs, IntSpec spec) {
  return UbViolation{kind, lhs, rhs, spec, std::nullopt};
}

}  // namespace

UbResult checked_arith(ArithOp op, wide_int a, wide_int b, IntSpec spec, UbOptions options) {
  require_representable(a, spec, "operand");
  require_representable(b, spec, "operand");
  return with_native_type(spec, [&](auto tag) -> UbResult {
    using T = decltype(tag);
    const T x = static_cast<T>(a);
    const T y = static_cast<T>(b);
    T result{};
    bool overflow = false;
    UbKind kind = UbKind::AddOverflow;
    switch (op) {
      case ArithOp::Add: overflow = __builtin_add_overflow(x, y, &result); break;
      case ArithOp::Sub:
        overflow = __builtin_sub_overflow(x, y, &result);
        kind = UbKind::SubOverflow;
        break;
      case ArithOp::Mul:
        overflow = __builtin_mul_overflow(x, y, &result);
        kind = UbKind::MulOverflow;
        break;
    }
    if (overflow && (std::is_signed_v<T> || options.strict_unsigned))
      return violation(kind, a, b, spec);
    return static_cast<wide_int>(result);
  });
}

UbResult checked_div(wide_int a, wide_int b, IntSpec spec, UbOptions) {
  require_representable(a, spec, "dividend");
  require_representable(b, spec, "divisor");
  return with_native_type(spec, [&](auto tag) -> UbResult {
    using T = decltype(tag);
    const T x = static_cast<T>(a);
    const T y = static_cast<T>(b);
    if (y == 0) return violation(UbKind::DivByZero, a, b, spec);
    if constexpr (std::is_signed_v<T>) {
      if (x == std::numeric_limits<T>::min() && y == T{-1})
        return violation(UbKind::DivOverflow, a, b, spec);
    }
    return static_cast<wide_int>(static_cast<T>(x / y));
  });
}

UbResult checked_shift(wide_int a, wide_int shift, IntSpec spec, UbOptions options) {
  require_representable(a, spec, "operand");
  if (shift < 0 || shift >= spec.width) return violation(UbKind::ShiftRange, a, shift, spec);
  const int s = static_cast<int>(shift);
  return with_native_type(spec, [&](auto tag) -> UbResult {
    using T = decltype(tag);
    using U = std::make_unsigned_t<T>;
    const T x = static_cast<T>(a);
    if constexpr (std::is_signed_v<T>) {
      const bool fits = x >= 0 ? x <= (std::numeric_limits<T>::max() >> s)
                               : x >= (std::numeric_limits<T>::min() >> s);
      if (!fits) return violation(UbKind::ShiftRange, a, shift, spec);
    } else {
      if (options.strict_unsigned && x > (std::numeric_limits<T>::max() >> s))
        return violation(UbKind::ShiftRange, a, shift, spec);
    }
    const U shifted = static_cast<U>(static_cast<U>(x) << s);
    return static_cast<wide_int>(static_cast<T>(shifted));
  });
}

UbResult checked_trunc(wide_int a, IntSpec from, IntSpec to) {
  require_representable(a, from, "operand");
  return with_native_type(to, [&](auto tag) -> UbResult {
    using T = decltype(tag);
    // Round-trip through the target type; any change means lost bits.
    const T narrowed = a < 0 ? static_cast<T>(static_cast<std::int64_t>(a))
                             : static_cast<T>(static_cast<std::uint64_t>(a));
    if (static_cast<wide_int>(narrowed) != a)
      return UbViolation{UbKind::Truncation, a, 0, from, to};
    return static_cast<wide_int>(narrowed);
  });
}

UbResult checked_float_to_int(double value, IntSpec to) {
  const double truncated = std::trunc(value);
  const double lo = to.is_signed ? -std::ldexp(1.0, to.width - 1) : 0.0;
  const double hi = to.is_signed ? std::ldexp(1.0, to.width - 1) : std::ldexp(1.0, to.width);
  if (std::isnan(value) || truncated < lo || truncated >= hi)
    return UbViolation{UbKind::Truncation, 0, 0, std::nullopt, to};
  return with_native_type(to, [&](auto tag) -> UbResult {
    using T = decltype(tag);
    return static_cast<wide_int>(static_cast<T>(truncated));
  });
}

std::optional<UbViolation> check_align(std::uint64_t offset, std::uint64_t align) {
  if (!std::has_single_bit(align))
    throw ConfigError("alignment " + std::to_string(align) + " is not a power of two");
  if ((offset & (align - 1)) != 0)
    return UbViolation{UbKind::Misaligned, offset, static_cast<wide_int>(align), std::nullopt,
                       std::nullopt};
  return std::nullopt;
}

std::optional<UbViolation> check_nonnull(std::uint64_t offset) {
  if (offset == 0) return UbViolation{UbKind::NullDeref, 0, 0, std::nullopt, std::nullopt};
  return std::nullopt;
}

std::optional<UbViolation> check_bool(wide_int value) {
  if (value == 0 || value == 1) return std::nullopt;
  return UbViolation{UbKind::BoolRange, value, 0, std::nullopt, std::nullopt};
}

std::optional<UbViolation> check_enum(wide_int value, const EnumSpec& spec) {
  if (spec.allowed.empty()) throw ConfigError("enum '" + spec.name + "' has no values");
  const bool in_range = value >= std::numeric_limits<std::int64_t>::min() &&
                        value <= std::numeric_limits<std::int64_t>::max() &&
                        spec.allowed.count(static_cast<std::int64_t>(value)) != 0;
  if (in_range) return std::nullopt;
  return UbViolation{UbKind::EnumRange, value, 0, std::nullopt, std::nullopt};
}

}  // namespace partsan

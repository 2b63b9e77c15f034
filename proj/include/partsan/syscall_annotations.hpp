//===-- syscall_annotations.hpp - Contract annotations for syscalls -*- C++ -*-===//
//
// Syscall templates carry `//!` directives ahead of a syscall_declare form:
//
//   //!USER_NAME: jet_thread_status
//   //!PRE: msan_check (&thread_id, sizeof (thread_id));
//   //!POST: msan_unpoison (status, sizeof (*status));
//   syscall_declare (ret_t, name, type_a, a, type_b*, b)
//
// PRE directives are checked before the call; POST directives run only
// after a successful call.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partsan/common.hpp"
#include "partsan/msan_shadow.hpp"
#include "json.hpp"

namespace partsan {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnknownType : public Error {
 public:
  explicit UnknownType(std::string type_name)
      : Error("unknown type '" + type_name + "'"), type_name_(std::move(type_name)) {}
  const std::string& type_name() const { return type_name_; }

 private:
  std::string type_name_;
};

class BindError : public Error {
 public:
  using Error::Error;
};

enum class DirectivePhase : std::uint8_t { Pre, Post };
enum class DirectiveKind : std::uint8_t { MsanCheck, MsanUnpoison };

struct TargetExpr {
  enum class Form : std::uint8_t { Param, AddrOf, Deref };
  Form form = Form::Param;
  std::string name;

  friend bool operator==(const TargetExpr&, const TargetExpr&) = default;
};

struct SizeExpr {
  enum class Form : std::uint8_t { SizeofParam, SizeofDeref, SizeofType, Literal };
  Form form = Form::Literal;
  std::string name;  // parameter or type name; empty for literals
  std::uint64_t literal = 0;

  friend bool operator==(const SizeExpr&, const SizeExpr&) = default;
};

struct CheckDirective {
  DirectivePhase phase = DirectivePhase::Pre;
  DirectiveKind kind = DirectiveKind::MsanCheck;
  TargetExpr target;
  SizeExpr size;

  friend bool operator==(const CheckDirective&, const CheckDirective&) = default;
};

struct SyscallParam {
  std::string type;  // pointer stars kept as part of the type, e.g. "void**"
  std::string name;

  friend bool operator==(const SyscallParam&, const SyscallParam&) = default;
};

struct SyscallSpec {
  std::string user_name;
  std::string return_type;
  std::string syscall_name;
  std::vector<SyscallParam> params;
  std::vector<CheckDirective> pre_checks;
  std::vector<CheckDirective> post_checks;

  const SyscallParam* find_param(std::string_view name) const;

  friend bool operator==(const SyscallSpec&, const SyscallSpec&) = default;
};

using TypeSizeTable = std::map<std::string, std::uint64_t, std::less<>>;

/// Where a parameter's storage (or pointee) lives in guest memory.
struct ParamBinding {
  std::uint64_t offset = 0;
  std::uint64_t len = 0;  // fallback size when the type table has no entry
};

using ParamBindings = std::map<std::string, ParamBinding, std::less<>>;

struct ResolvedDirective {
  DirectiveKind kind = DirectiveKind::MsanCheck;
  std::string param;
  std::uint64_t offset = 0;
  std::uint64_t len = 0;

  friend bool operator==(const ResolvedDirective&, const ResolvedDirective&) = default;
};

struct ResolvedSpec {
  std::string syscall_name;
  std::vector<ResolvedDirective> pre;
  std::vector<ResolvedDirective> post;
};

/// Parses exactly one template. Throws ParseError with a 1-based position.
SyscallSpec parse_template(std::string_view text);

/// Parses a sequence of templates, each ending with its syscall_declare form.
std::vector<SyscallSpec> parse_templates(std::string_view text);

/// Canonical text form; parse_template(render_template(s)) == s.
std::string render_template(const SyscallSpec& spec);

/// Reduces every target to a guest offset and every size to a byte count.
/// Throws UnknownType or BindError.
ResolvedSpec resolve_sizes(const SyscallSpec& spec, const TypeSizeTable& types,
                           const ParamBindings& bindings);

/// Runs PRE checks in order and stops at the first failure.
std::optional<MsanViolation> enforce_pre(const ResolvedSpec& resolved, const InitShadow& shadow,
                                         std::uint64_t* checks_run = nullptr);

/// Runs POST directives only when the call succeeded.
void enforce_post(const ResolvedSpec& resolved, InitShadow& shadow, bool syscall_succeeded,
                  OriginId origin);

nlohmann::json to_json(const SyscallSpec& spec);

}  // namespace partsan

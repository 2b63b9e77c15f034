//===-- syscall_annotations.cpp - Contract annotations for syscalls --------===//
//
// Hand-written lexer and recursive-descent parser for syscall templates.
// Whitespace (including newlines) is insignificant between tokens, which is
// what lets a directive continue on the following line. Any other `//`
// comment is rejected.
//
//===----------------------------------------------------------------------===//

#include "partsan/syscall_annotations.hpp"

#include <cctype>
#include <charconv>

namespace partsan {

const SyscallParam* SyscallSpec::find_param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

namespace {

enum class Tok : std::uint8_t {
  Ident, Integer, LParen, RParen, Comma, Amp, Star, Colon, Semi, Annotation, End,
};

const char* describe(Tok tok) {
  switch (tok) {
    case Tok::Ident: return "identifier";
    case Tok::Integer: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Amp: return "'&'";
    case Tok::Star: return "'*'";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Annotation: return "'//!'";
    case Tok::End: return "end of input";
  }
  return "token";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    for (;;) {
      skip_space();
      Token tok{Tok::End, {}, line_, column_};
      if (pos_ >= text_.size()) {
        tokens.push_back(tok);
        return tokens;
      }
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Tok::Ident;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          tok.text.push_back(take());
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        tok.kind = Tok::Integer;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
          tok.text.push_back(take());
      } else if (c == '/') {
        if (text_.substr(pos_, 3) != "//!")
          throw ParseError("comments are not allowed outside '//!' directives", line_, column_);
        take(), take(), take();
        tok.kind = Tok::Annotation;
        tok.text = "//!";
      } else {
        switch (c) {
          case '(': tok.kind = Tok::LParen; break;
          case ')': tok.kind = Tok::RParen; break;
          case ',': tok.kind = Tok::Comma; break;
          case '&': tok.kind = Tok::Amp; break;
          case '*': tok.kind = Tok::Star; break;
          case ':': tok.kind = Tok::Colon; break;
          case ';': tok.kind = Tok::Semi; break;
          default: {
            const auto byte = static_cast<unsigned char>(c);
            std::string shown = std::isprint(byte) ? std::string(1, c)
                                                   : "\\x" + std::to_string(static_cast<int>(byte));
            throw ParseError("unexpected character '" + shown + "'", line_, column_);
          }
        }
        tok.text.push_back(take());
      }
      tokens.push_back(std::move(tok));
    }
  }

 private:
  char take() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) take();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// Name references are only checkable once the declaration has been read.
struct PendingRef {
  std::string name;
  std::size_t line;
  std::size_t column;
};

struct PendingDirective {
  CheckDirective directive;
  PendingRef target;
  std::optional<PendingRef> size_ref;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool at_end() const { return peek().kind == Tok::End; }
  const Token& peek() const { return tokens_[index_]; }

  SyscallSpec parse_one() {
    SyscallSpec spec;
    std::vector<PendingDirective> pending;
    bool have_user_name = false;

    while (peek().kind == Tok::Annotation) {
      advance();
      const Token key = expect(Tok::Ident, "annotation key");
      expect(Tok::Colon, "':' after annotation key");
      if (key.text == "USER_NAME") {
        if (have_user_name) fail("duplicate USER_NAME annotation", key);
        spec.user_name = expect(Tok::Ident, "user name").text;
        have_user_name = true;
      } else if (key.text == "PRE" || key.text == "POST") {
        pending.push_back(parse_call(key.text == "PRE" ? DirectivePhase::Pre : DirectivePhase::Post));
      } else {
        fail("unknown annotation key '" + key.text + "'", key);
      }
      accept(Tok::Semi);
    }

    const Token decl = expect(Tok::Ident, "'syscall_declare'");
    if (decl.text != "syscall_declare") fail("expected 'syscall_declare', found '" + decl.text + "'", decl);
    expect(Tok::LParen, "'(' after syscall_declare");
    spec.return_type = expect(Tok::Ident, "return type").text;
    expect(Tok::Comma, "',' after return type");
    spec.syscall_name = expect(Tok::Ident, "syscall name").text;
    while (accept(Tok::Comma)) {
      SyscallParam param;
      param.type = expect(Tok::Ident, "parameter type").text;
      while (accept(Tok::Star)) param.type.push_back('*');
      expect(Tok::Comma, "',' between parameter type and name");
      const Token name = expect(Tok::Ident, "parameter name");
      if (spec.find_param(name.text)) fail("duplicate parameter '" + name.text + "'", name);
      param.name = name.text;
      spec.params.push_back(std::move(param));
    }
    expect(Tok::RParen, "')' closing syscall_declare");
    accept(Tok::Semi);

    for (auto& p : pending) {
      if (!spec.find_param(p.target.name))
        throw ParseError("unknown parameter '" + p.target.name + "' in directive target",
                         p.target.line, p.target.column);
      auto& size = p.directive.size;
      if (size.form == SizeExpr::Form::SizeofDeref && !spec.find_param(size.name))
        throw ParseError("unknown parameter '" + size.name + "' in sizeof", p.size_ref->line,
                         p.size_ref->column);
      // Inside sizeof a bare name is a parameter first, a type otherwise.
      if (size.form == SizeExpr::Form::SizeofType && spec.find_param(size.name))
        size.form = SizeExpr::Form::SizeofParam;
      auto& list = p.directive.phase == DirectivePhase::Pre ? spec.pre_checks : spec.post_checks;
      list.push_back(std::move(p.directive));
    }
    return spec;
  }

 private:
  PendingDirective parse_call(DirectivePhase phase) {
    PendingDirective out;
    out.directive.phase = phase;
    const Token callee = expect(Tok::Ident, "'msan_check' or 'msan_unpoison'");
    if (callee.text == "msan_check")
      out.directive.kind = DirectiveKind::MsanCheck;
    else if (callee.text == "msan_unpoison")
      out.directive.kind = DirectiveKind::MsanUnpoison;
    else
      fail("unknown directive call '" + callee.text + "'", callee);
    expect(Tok::LParen, "'(' after " + callee.text);

    auto& target = out.directive.target;
    if (accept(Tok::Amp))
      target.form = TargetExpr::Form::AddrOf;
    else if (accept(Tok::Star))
      target.form = TargetExpr::Form::Deref;
    const Token name = expect(Tok::Ident, "target parameter");
    target.name = name.text;
    out.target = PendingRef{name.text, name.line, name.column};

    expect(Tok::Comma, "',' between target and size");
    auto& size = out.directive.size;
    if (peek().kind == Tok::Integer) {
      const Token lit = peek();
      advance();
      size.form = SizeExpr::Form::Literal;
      const auto* end = lit.text.data() + lit.text.size();
      auto [ptr, ec] = std::from_chars(lit.text.data(), end, size.literal);
      if (ec != std::errc() || ptr != end) fail("malformed integer '" + lit.text + "'", lit);
    } else {
      const Token kw = expect(Tok::Ident, "'sizeof' or integer size");
      if (kw.text != "sizeof") fail("expected 'sizeof', found '" + kw.text + "'", kw);
      expect(Tok::LParen, "'(' after sizeof");
      const bool deref = accept(Tok::Star);
      const Token operand = expect(Tok::Ident, "sizeof operand");
      size.form = deref ? SizeExpr::Form::SizeofDeref : SizeExpr::Form::SizeofType;
      size.name = operand.text;
      out.size_ref = PendingRef{operand.text, operand.line, operand.column};
      expect(Tok::RParen, "')' closing sizeof");
    }
    expect(Tok::RParen, "')' closing " + callee.text);
    return out;
  }

  void advance() {
    if (tokens_[index_].kind != Tok::End) ++index_;
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }

  Token expect(Tok kind, const std::string& what) {
    const Token tok = peek();
    if (tok.kind != kind) {
      std::string found = tok.kind == Tok::End ? "end of input"
                                               : std::string(describe(tok.kind)) + " '" + tok.text + "'";
      fail("expected " + what + ", found " + found, tok);
    }
    advance();
    return tok;
  }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError(message, at.line, at.column);
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

std::string render_target(const TargetExpr& target) {
  switch (target.form) {
    case TargetExpr::Form::AddrOf: return "&" + target.name;
    case TargetExpr::Form::Deref: return "*" + target.name;
    case TargetExpr::Form::Param: return target.name;
  }
  return target.name;
}

std::string render_size(const SizeExpr& size) {
  switch (size.form) {
    case SizeExpr::Form::Literal: return std::to_string(size.literal);
    case SizeExpr::Form::SizeofDeref: return "sizeof (*" + size.name + ")";
    case SizeExpr::Form::SizeofParam:
    case SizeExpr::Form::SizeofType: return "sizeof (" + size.name + ")";
  }
  return {};
}

const char* call_name(DirectiveKind kind) {
  return kind == DirectiveKind::MsanCheck ? "msan_check" : "msan_unpoison";
}

const char* target_form_name(TargetExpr::Form form) {
  switch (form) {
    case TargetExpr::Form::Param: return "PARAM";
    case TargetExpr::Form::AddrOf: return "ADDR_OF";
    case TargetExpr::Form::Deref: return "DEREF";
  }
  return "UNKNOWN";
}

const char* size_form_name(SizeExpr::Form form) {
  switch (form) {
    case SizeExpr::Form::SizeofParam: return "SIZEOF_PARAM";
    case SizeExpr::Form::SizeofDeref: return "SIZEOF_DEREF";
    case SizeExpr::Form::SizeofType: return "SIZEOF_TYPE";
    case SizeExpr::Form::Literal: return "LITERAL";
  }
  return "UNKNOWN";
}

std::uint64_t type_size_or_binding(const TypeSizeTable& types, const std::string& type,
                                   const ParamBinding* binding) {
  if (auto it = types.find(type); it != types.end()) return it->second;
  if (binding && binding->len > 0) return binding->len;
  throw UnknownType(type);
}

ResolvedDirective resolve(const CheckDirective& d, const SyscallSpec& spec,
                          const TypeSizeTable& types, const ParamBindings& bindings) {
  auto binding_for = [&](const std::string& name) -> const ParamBinding* {
    auto it = bindings.find(name);
    return it == bindings.end() ? nullptr : &it->second;
  };
  const ParamBinding* target = binding_for(d.target.name);
  if (!target)
    throw BindError("parameter '" + d.target.name + "' of " + spec.syscall_name + " is not bound");

  std::uint64_t len = 0;
  switch (d.size.form) {
    case SizeExpr::Form::Literal: len = d.size.literal; break;
    case SizeExpr::Form::SizeofType: {
      auto it = types.find(d.size.name);
      if (it == types.end()) throw UnknownType(d.size.name);
      len = it->second;
      break;
    }
    case SizeExpr::Form::SizeofParam: {
      const auto* param = spec.find_param(d.size.name);
      len = type_size_or_binding(types, param->type, binding_for(d.size.name));
      break;
    }
    case SizeExpr::Form::SizeofDeref: {
      std::string pointee = spec.find_param(d.size.name)->type;
      if (!pointee.empty() && pointee.back() == '*') pointee.pop_back();
      len = type_size_or_binding(types, pointee, binding_for(d.size.name));
      break;
    }
  }
  return ResolvedDirective{d.kind, d.target.name, target->offset, len};
}

}  // namespace

std::vector<SyscallSpec> parse_templates(std::string_view text) {
  Parser parser(Lexer(text).run());
  std::vector<SyscallSpec> specs;
  while (!parser.at_end()) specs.push_back(parser.parse_one());
  return specs;
}

SyscallSpec parse_template(std::string_view text) {
  Parser parser(Lexer(text).run());
  SyscallSpec spec = parser.parse_one();
  if (!parser.at_end()) {
    const Token& extra = parser.peek();
    throw ParseError("expected end of input after syscall_declare", extra.line, extra.column);
  }
  return spec;
}

std::string render_template(const SyscallSpec& spec) {
  std::string out;
  if (!spec.user_name.empty()) out += "//!USER_NAME: " + spec.user_name + "\n";
  for (const auto* list : {&spec.pre_checks, &spec.post_checks}) {
    for (const auto& d : *list) {
      out += d.phase == DirectivePhase::Pre ? "//!PRE: " : "//!POST: ";
      out += std::string(call_name(d.kind)) + " (" + render_target(d.target) + ", " +
             render_size(d.size) + ");\n";
    }
  }
  out += "syscall_declare (\n    " + spec.return_type + ",\n    " + spec.syscall_name;
  for (const auto& p : spec.params) out += ",\n    " + p.type + ", " + p.name;
  out += ")\n";
  return out;
}

ResolvedSpec resolve_sizes(const SyscallSpec& spec, const TypeSizeTable& types,
                           const ParamBindings& bindings) {
  ResolvedSpec out;
  out.syscall_name = spec.syscall_name;
  for (const auto& d : spec.pre_checks) out.pre.push_back(resolve(d, spec, types, bindings));
  for (const auto& d : spec.post_checks) out.post.push_back(resolve(d, spec, types, bindings));
  return out;
}

std::optional<MsanViolation> enforce_pre(const ResolvedSpec& resolved, const InitShadow& shadow,
                                         std::uint64_t* checks_run) {
  for (const auto& d : resolved.pre) {
    if (d.kind != DirectiveKind::MsanCheck) continue;
    if (checks_run) ++*checks_run;
    if (auto violation = msan_check(shadow, d.offset, d.len, UseSite::SyscallPre)) return violation;
  }
  return std::nullopt;
}

void enforce_post(const ResolvedSpec& resolved, InitShadow& shadow, bool syscall_succeeded,
                  OriginId origin) {
  if (!syscall_succeeded) return;
  for (const auto& d : resolved.post) {
    if (d.kind == DirectiveKind::MsanUnpoison) msan_unpoison(shadow, d.offset, d.len, origin);
  }
}

nlohmann::json to_json(const SyscallSpec& spec) {
  auto directive_json = [](const CheckDirective& d) {
    nlohmann::json size = {{"form", size_form_name(d.size.form)}};
    if (d.size.form == SizeExpr::Form::Literal)
      size["value"] = d.size.literal;
    else
      size["name"] = d.size.name;
    return nlohmann::json{
        {"call", call_name(d.kind)},
        {"target", {{"form", target_form_name(d.target.form)}, {"name", d.target.name}}},
        {"size", size},
    };
  };
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : spec.params) params.push_back({{"type", p.type}, {"name", p.name}});
  nlohmann::json pre = nlohmann::json::array();
  for (const auto& d : spec.pre_checks) pre.push_back(directive_json(d));
  nlohmann::json post = nlohmann::json::array();
  for (const auto& d : spec.post_checks) post.push_back(directive_json(d));
  return nlohmann::json{
      {"user_name", spec.user_name},     {"return_type", spec.return_type},
      {"syscall_name", spec.syscall_name}, {"params", params},
      {"pre", pre},                      {"post", post},
  };
}

}  // namespace partsan

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "partsan/syscall_annotations.hpp"

using namespace partsan;

TEST(ParseTemplate, ListingTwo) {
  EXPECT_EQ(parse_template(fixtures::read("listing2.tmpl")), fixtures::listing2_spec());
}

TEST(ParseTemplate, DeclarationOnly) {
  const auto spec = parse_template("syscall_declare (int, do_nothing)");
  EXPECT_EQ(spec.syscall_name, "do_nothing");
  EXPECT_TRUE(spec.params.empty());
  EXPECT_TRUE(spec.pre_checks.empty());
  EXPECT_TRUE(spec.post_checks.empty());
}

TEST(ParseTemplate, UnknownParameterNamesIt) {
  try {
    parse_template("//!PRE: msan_check(&bogus, 4)\nsyscall_declare (int, f, int, x)");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 21u);
  }
}

TEST(ParseTemplate, Errors) {
  EXPECT_THROW(parse_template("//!WHATEVER: x\nsyscall_declare (int, f)"), ParseError);
  EXPECT_THROW(parse_template("//!PRE: msan_check(x 4)\nsyscall_declare (int, f, int, x)"), ParseError);
  EXPECT_THROW(parse_template("// plain comment\nsyscall_declare (int, f)"), ParseError);
  EXPECT_THROW(parse_template("syscall_declare (int, f, int, x, int, x)"), ParseError);
  EXPECT_THROW(parse_template("syscall_declare (int, f) trailing"), ParseError);
  EXPECT_THROW(parse_template(""), ParseError);
}

TEST(ParseTemplates, Sequence) {
  const auto specs = parse_templates(
      "syscall_declare (int, a)\n//!PRE: msan_check (x, 4)\nsyscall_declare (int, b, int*, x)");
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[1].pre_checks.size(), 1u);
}

TEST(RenderTemplate, RoundTrips) {
  const auto spec = fixtures::listing2_spec();
  EXPECT_EQ(parse_template(render_template(spec)), spec);
}

namespace {

const TypeSizeTable kTypes{{"jet_thread_id_t", 4}, {"max_name_t", 32}, {"void*", 8},
                           {"jet_thread_status_t", 24}};
const ParamBindings kBindings{{"thread_id", {100, 0}}, {"name", {200, 0}}, {"entry", {300, 0}},
                              {"status", {400, 0}}};

}  // namespace

TEST(ResolveSizes, ListingTwo) {
  const auto r = resolve_sizes(fixtures::listing2_spec(), kTypes, kBindings);
  ASSERT_EQ(r.pre.size(), 1u);
  EXPECT_EQ(r.pre[0], (ResolvedDirective{DirectiveKind::MsanCheck, "thread_id", 100, 4}));
  ASSERT_EQ(r.post.size(), 3u);
  EXPECT_EQ(r.post[0].len, 32u);
  EXPECT_EQ(r.post[1].len, 8u);
  EXPECT_EQ(r.post[2].len, 24u);
}

TEST(ResolveSizes, LiteralAndMissingType) {
  auto spec = parse_template("//!PRE: msan_check (p, 4)\nsyscall_declare (int, f, char*, p)");
  EXPECT_EQ(resolve_sizes(spec, {}, {{"p", {64, 0}}}).pre[0].len, 4u);
  spec = parse_template("//!PRE: msan_check (p, sizeof (missing_t))\nsyscall_declare (int, f, char*, p)");
  try {
    resolve_sizes(spec, {}, {{"p", {64, 0}}});
    FAIL();
  } catch (const UnknownType& e) {
    EXPECT_EQ(e.type_name(), "missing_t");
  }
  EXPECT_THROW(resolve_sizes(spec, {{"missing_t", 2}}, {}), BindError);
}

TEST(ResolveSizes, BindingLengthIsTheFallback) {
  const auto spec = parse_template("//!PRE: msan_check (p, sizeof (p))\nsyscall_declare (int, f, opaque_t, p)");
  EXPECT_EQ(resolve_sizes(spec, {}, {{"p", {64, 12}}}).pre[0].len, 12u);
}

TEST(Enforce, SuccessPathInitializesOutputs) {
  const auto r = resolve_sizes(fixtures::listing2_spec(), kTypes, kBindings);
  InitShadow s(1, 1024);
  s.mark_initialized(100, 4, 1);
  std::uint64_t checks = 0;
  EXPECT_FALSE(enforce_pre(r, s, &checks));
  EXPECT_EQ(checks, 1u);
  enforce_post(r, s, true, 2);
  EXPECT_FALSE(msan_check(s, 200, 32, UseSite::Branch));
  EXPECT_FALSE(msan_check(s, 300, 8, UseSite::Branch));
  EXPECT_FALSE(msan_check(s, 400, 24, UseSite::Branch));
}

TEST(Enforce, UninitializedInputFiresAtItsAddress) {
  const auto r = resolve_sizes(fixtures::listing2_spec(), kTypes, kBindings);
  InitShadow s(1, 1024);
  const auto v = enforce_pre(r, s);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->addr.offset, 100u);
  EXPECT_EQ(v->context, UseSite::SyscallPre);
}

TEST(Enforce, FailedCallLeavesOutputsUninitialized) {
  const auto r = resolve_sizes(fixtures::listing2_spec(), kTypes, kBindings);
  InitShadow s(1, 1024);
  s.mark_initialized(100, 4, 1);
  enforce_post(r, s, false, 2);
  EXPECT_TRUE(msan_check(s, 400, 24, UseSite::Branch));
}

TEST(Enforce, PreChecksRunInTextOrder) {
  const auto spec = parse_template(
      "//!PRE: msan_check (b, 1)\n//!PRE: msan_check (a, 1)\nsyscall_declare (int, f, char*, a, char*, b)");
  const auto r = resolve_sizes(spec, {}, {{"a", {10, 0}}, {"b", {20, 0}}});
  InitShadow s(1, 64);
  EXPECT_EQ(enforce_pre(r, s)->addr.offset, 20u);
}

TEST(ToJson, ListingTwoShape) {
  const auto j = to_json(fixtures::listing2_spec());
  EXPECT_EQ(j.at("user_name"), "jet_thread_status");
  EXPECT_EQ(j.at("params").size(), 4u);
  EXPECT_EQ(j.at("pre").size(), 1u);
  EXPECT_EQ(j.at("post").size(), 3u);
}

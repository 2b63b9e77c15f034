#include <gtest/gtest.h>

#include "partsan/msan_shadow.hpp"

using namespace partsan;

TEST(MsanCheck, FreshBytesAreUninitialized) {
  InitShadow s(1, 64);
  s.poison(16, 4, 3);
  const auto v = msan_check(s, 16, 4, UseSite::SyscallPre);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->addr.offset, 16u);
  EXPECT_EQ(v->context, UseSite::SyscallPre);
  EXPECT_EQ(v->origin, 3u);
  EXPECT_EQ(v->requested_len, 4u);
}

TEST(MsanCheck, PassesAfterWrite) {
  InitShadow s(1, 64);
  s.mark_initialized(16, 4, 1);
  EXPECT_FALSE(msan_check(s, 16, 4, UseSite::Branch));
}

TEST(MsanCheck, HalfWrittenRangeFiresAtFirstGap) {
  InitShadow s(1, 64);
  s.mark_initialized(16, 4, 1);
  const auto v = msan_check(s, 16, 8, UseSite::Arith);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->addr.offset, 20u);
}

TEST(MsanUnpoison, ThenCheckPasses) {
  InitShadow s(1, 64);
  msan_unpoison(s, 8, 8, 2);
  EXPECT_FALSE(msan_check(s, 8, 8, UseSite::SyscallPre));
}

TEST(MsanUnpoison, ZeroLengthIsNoOp) {
  InitShadow s(1, 64);
  msan_unpoison(s, 8, 0, 2);
  EXPECT_FALSE(s.is_initialized(8));
}

TEST(MsanUnpoison, KeepsOriginsOfInitializedBytes) {
  InitShadow s(1, 64);
  s.mark_initialized(0, 4, 10);
  msan_unpoison(s, 2, 6, 20);
  EXPECT_EQ(s.origin(0), 10u);
  EXPECT_EQ(s.origin(3), 10u);
  EXPECT_EQ(s.origin(4), 20u);
  EXPECT_EQ(s.origin(7), 20u);
}

TEST(CopyPropagate, HalfInitializedStaysHalf) {
  InitShadow src(1, 64), dst(2, 64);
  src.poison(0, 8, 5);
  src.mark_initialized(0, 4, 6);
  copy_propagate(src, 0, dst, 32, 8);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(dst.is_initialized(32 + i), i < 4);
}

TEST(CopyPropagate, FullyInitializedStaysFull) {
  InitShadow src(1, 64), dst(2, 64);
  src.mark_initialized(0, 8, 1);
  copy_propagate(src, 0, dst, 0, 8);
  EXPECT_FALSE(msan_check(dst, 0, 8, UseSite::Branch));
}

TEST(CopyPropagate, OriginPointsAtAllocationNotCopy) {
  OriginTable origins;
  const auto alloc = origins.add(OriginKind::Allocation, 2);
  InitShadow src(1, 64), dst(2, 64);
  src.poison(0, 8, alloc);
  copy_propagate(src, 0, dst, 16, 8);
  const auto v = msan_check(dst, 16, 8, UseSite::SyscallPre);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->origin, alloc);
  EXPECT_EQ(origins.describe(v->origin), "alloc@2");
}

TEST(CopyPropagate, OverlapBehavesLikeMemmove) {
  InitShadow s(1, 16);
  s.mark_initialized(0, 4, 1);
  s.copy_from(s, 0, 2, 8);
  for (int i = 0; i < 16; ++i) EXPECT_EQ(s.is_initialized(i), i < 6) << i;
}

TEST(Padding, DeclaredRangeBecomesInitialized) {
  PaddingRegistry reg;
  reg.declare("pair_t", 8, {{4, 4}});
  InitShadow s(1, 64);
  unpoison_padding(s, reg, "pair_t", 0, 1);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.is_initialized(i), i >= 4) << i;
}

TEST(Padding, TypeWithoutHolesIsNoOp) {
  PaddingRegistry reg;
  reg.declare("int_t", 4, {});
  InitShadow s(1, 64);
  unpoison_padding(s, reg, "int_t", 0, 1);
  for (int i = 0; i < 4; ++i) EXPECT_FALSE(s.is_initialized(i));
}

TEST(Padding, UnknownTypeIsConfigError) {
  PaddingRegistry reg;
  InitShadow s(1, 64);
  EXPECT_THROW(unpoison_padding(s, reg, "nope_t", 0, 1), ConfigError);
}

TEST(Padding, RangesMustFitAndNotOverlap) {
  PaddingRegistry reg;
  EXPECT_THROW(reg.declare("a", 8, {{6, 4}}), ConfigError);
  EXPECT_THROW(reg.declare("b", 8, {{0, 4}, {2, 2}}), ConfigError);
}

TEST(OriginTable, DescribesTags) {
  OriginTable t;
  EXPECT_EQ(t.describe(kNoOrigin), "none");
  const auto w = t.add(OriginKind::Write, 7);
  const auto d = t.add(OriginKind::Declaration, 0);
  EXPECT_EQ(t.describe(w), "write@7");
  EXPECT_EQ(t.describe(d), "decl@0");
  EXPECT_THROW((void)t.at(99), std::out_of_range);
}

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "partsan/guest_memory.hpp"
#include "sweeps.hpp"

using namespace partsan;

class ShadowOracle : public ::testing::TestWithParam<std::uint32_t> {};

TEST_P(ShadowOracle, AgreesWithPerByteMap) {
  const auto result = oracle::shadow_sweep(GetParam(), 10'000, 0x5eed + GetParam());
  EXPECT_EQ(result.divergences, 0u) << result.first;
  EXPECT_GT(result.interesting, 100u);
}

INSTANTIATE_TEST_SUITE_P(Granularities, ShadowOracle, ::testing::Values(1u, 2u, 4u, 8u, 16u));

TEST(ShadowEncoding, EveryRepresentableGranuleRoundTrips) {
  for (std::uint32_t g : {1u, 2u, 4u, 8u, 16u}) {
    for (std::uint32_t prefix = 0; prefix <= g; ++prefix) {
      for (PoisonKind kind : {PoisonKind::LeftRedzone, PoisonKind::RightRedzone,
                              PoisonKind::PartitionReset, PoisonKind::ManualBlacklist}) {
        ShadowMap map(1, 2 * g, g, kind);
        if (prefix > 0) map.unpoison(0, prefix);
        for (std::uint32_t i = 0; i < g; ++i)
          EXPECT_EQ(map.is_addressable(i), i < prefix) << "g=" << g << " prefix=" << prefix;
        if (prefix == 0) {
          const auto v = map.check_access(0, 1, AccessKind::Read);
          ASSERT_TRUE(v);
          EXPECT_EQ(oracle::code_for(v->kind), static_cast<std::uint8_t>(kind));
        }
      }
    }
  }
}

TEST(InitOracle, AgreesWithPerByteBooleans) {
  const auto result = oracle::init_sweep(10'000, 0xfeed);
  EXPECT_EQ(result.divergences, 0u) << result.first;
  EXPECT_GT(result.interesting, 0u) << "no origin crossed a copy hop";
}

TEST(InitOracle, ChecksAreReadOnly) {
  std::mt19937_64 rng(3);
  InitShadow s(1, 256);
  for (int i = 0; i < 200; ++i) {
    const auto off = rng() % 200;
    if (rng() % 2) s.mark_initialized(off, 1 + rng() % 50, static_cast<OriginId>(i + 1));
    else s.poison(off, 1 + rng() % 50, static_cast<OriginId>(i + 1));
  }
  std::vector<std::pair<bool, OriginId>> before;
  for (std::uint64_t i = 0; i < 256; ++i) before.emplace_back(s.is_initialized(i), s.origin(i));
  for (int i = 0; i < 500; ++i) (void)s.check(rng() % 200, 1 + rng() % 56, UseSite::Arith);
  for (std::uint64_t i = 0; i < 256; ++i)
    EXPECT_EQ(before[i], std::make_pair(s.is_initialized(i), s.origin(i)));
}

TEST(ReservedInit, PatternOnlyWritesLeaveBitsAlone) {
  std::mt19937_64 rng(11);
  MemoryOptions opts;
  opts.reserved_init = {true, 0xCD};
  PartitionMemory mem(1, 1024, opts);
  const auto r = mem.alloc_region(256, "v");
  std::vector<bool> model(256, false);
  for (int i = 0; i < 2000; ++i) {
    const auto off = rng() % 256;
    const auto len = 1 + rng() % std::min<std::uint64_t>(16, 256 - off);
    std::vector<std::uint8_t> bytes(len, 0xCD);
    const bool all_pattern = rng() % 2 == 0;
    if (!all_pattern) bytes[rng() % len] = static_cast<std::uint8_t>(rng() % 0xCD);
    ASSERT_FALSE(mem.checked_write(r.base.offset + off, bytes, 1));
    if (!all_pattern)
      for (std::uint64_t k = 0; k < len; ++k) model[off + k] = true;
    for (std::uint64_t k = 0; k < 256; ++k)
      ASSERT_EQ(mem.init_shadow().is_initialized(r.base.offset + k), model[k]) << "write " << i;
  }
}

// Every offset is in exactly one of payload, redzone or unallocated space, and
// the shadow agrees: only payload bytes are addressable.
TEST(GuestMemory, SpanPartitionMatchesShadow) {
  std::mt19937_64 rng(21);
  for (std::uint32_t g : {1u, 2u, 4u, 8u, 16u}) {
    for (int trial = 0; trial < 5; ++trial) {
      MemoryOptions opts;
      opts.granularity = g;
      opts.redzone = 1 + rng() % 40;
      PartitionMemory mem(1, 16 * 1024, opts);
      try {
        for (int i = 0; i < 60; ++i) mem.alloc_region(1 + rng() % 300, "r" + std::to_string(i));
      } catch (const OutOfMemory&) {
      }
      std::vector<int> cls(mem.size(), 0);  // 0 free, 1 payload, 2 redzone
      for (const auto& r : mem.regions()) {
        for (auto i = r.span_begin(); i < r.span_end(); ++i) {
          ASSERT_EQ(cls[i], 0) << "spans overlap at " << i;
          cls[i] = 2;
        }
        for (auto i = r.base.offset; i < r.base.offset + r.payload_len; ++i) cls[i] = 1;
      }
      for (std::uint64_t i = 0; i < mem.size(); ++i)
        ASSERT_EQ(mem.shadow().is_addressable(i), cls[i] == 1) << "g=" << g << " offset " << i;
    }
  }
}

TEST(GuestMemory, WildAccessesMutateNothing) {
  std::mt19937_64 rng(5);
  PartitionMemory mem(1, 512);
  const auto r = mem.alloc_region(64, "a");
  mem.start();
  for (int i = 0; i < 500; ++i) {
    const auto off = 400 + rng() % 200;
    const auto len = 1 + rng() % 200;
    if (off + len <= mem.size()) continue;
    const std::vector<std::uint8_t> before(mem.raw_bytes().begin(), mem.raw_bytes().end());
    std::vector<std::uint8_t> data(len, 0x11);
    const auto w = mem.checked_write(off, data, 1);
    ASSERT_TRUE(w);
    EXPECT_EQ(w->kind, AsanErrorKind::WildAddress);
    std::vector<std::uint8_t> out(len, 0);
    const auto rd = mem.checked_read(off, out);
    ASSERT_TRUE(rd);
    EXPECT_EQ(rd->kind, AsanErrorKind::WildAddress);
    EXPECT_TRUE(std::equal(before.begin(), before.end(), mem.raw_bytes().begin()));
  }
  (void)r;
}

TEST(GuestMemory, WriteThenReadRoundTrips) {
  std::mt19937_64 rng(9);
  PartitionMemory mem(1, 4096);
  const auto r = mem.alloc_region(1000, "a");
  for (int i = 0; i < 1000; ++i) {
    const auto off = rng() % 1000;
    const auto len = 1 + rng() % (1000 - off);
    std::vector<std::uint8_t> data(len);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    ASSERT_FALSE(mem.checked_write(r.base.offset + off, data, 1));
    std::vector<std::uint8_t> out(len);
    ASSERT_FALSE(mem.checked_read(r.base.offset + off, out));
    ASSERT_EQ(out, data);
  }
}

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sweeps.hpp"

using namespace partsan;

class UbOracle : public ::testing::TestWithParam<IntSpec> {};

TEST_P(UbOracle, AgreesWithWideReference) {
  const IntSpec spec = GetParam();
  const auto result = oracle::ub_sweep(spec, 100'000, 0xab + spec.width + (spec.is_signed ? 1 : 0));
  EXPECT_EQ(result.divergences, 0u) << result.first;
  EXPECT_GT(result.interesting, 1000u);
}

INSTANTIATE_TEST_SUITE_P(AllSpecs, UbOracle,
                         ::testing::Values(IntSpec{8, true}, IntSpec{16, true}, IntSpec{32, true},
                                           IntSpec{64, true}, IntSpec{8, false},
                                           IntSpec{16, false}, IntSpec{32, false},
                                           IntSpec{64, false}),
                         [](const auto& info) { return info.param.name(); });

TEST(UbOracle, FloatCastAgreesWithRangeCheck) {
  std::mt19937_64 rng(77);
  for (const IntSpec to : {IntSpec{8, true}, IntSpec{32, false}, IntSpec{64, true}, IntSpec{64, false}}) {
    for (int i = 0; i < 20'000; ++i) {
      const double scale = std::ldexp(1.0, static_cast<int>(rng() % 70));
      const double v = (static_cast<double>(rng() % 2'000'001) / 1'000'000.0 - 1.0) * scale;
      const double t = std::trunc(v);
      const bool fits = t >= static_cast<double>(oracle::spec_min(to)) &&
                        t <= static_cast<double>(oracle::spec_max(to)) &&
                        // the max of 64-bit specs is not a double; 2^63 / 2^64 are out
                        !(to.width == 64 && t == std::ldexp(1.0, to.is_signed ? 63 : 64));
      const auto got = checked_float_to_int(v, to);
      ASSERT_EQ(std::holds_alternative<wide_int>(got), fits) << v << " to " << to.name();
      if (fits) ASSERT_EQ(std::get<wide_int>(got), static_cast<wide_int>(t));
    }
    EXPECT_TRUE(std::holds_alternative<UbViolation>(checked_float_to_int(std::nan(""), to)));
  }
}

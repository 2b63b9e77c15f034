#include <gtest/gtest.h>

#include "partsan/report.hpp"

using namespace partsan;

namespace {

RunReport sample() {
  RunReport r;
  r.scenario = "demo";
  r.seed = 3;
  r.slowdown_factor = "3/2";
  r.raw_ticks = 30;
  r.virtual_ticks = 20;
  r.events.push_back(EventRecord{"DISPATCH", 0, 1, 2u, "priority=5"});
  r.events.push_back(EventRecord{"RESET", 7, 1, std::nullopt, "memory poisoned"});
  r.violations.push_back(ViolationRecord{"LEFT_REDZONE", 1, 0x1f, 1, "W", 1, "quote \" and \\"});
  r.violations.push_back(ViolationRecord{"DEADLINE_MISS", 2, 0, 0, "-", std::nullopt, "late"});
  r.verdict = Verdict::Mismatch;
  r.missing = 1;
  r.unexpected = 2;
  return r;
}

}  // namespace

TEST(EmitReport, EmptyTextIsHeaderAndVerdict) {
  RunReport r;
  r.scenario = "empty";
  EXPECT_EQ(emit_report(r, ReportFormat::Text),
            "REPORT scenario=empty seed=0 slowdown=1 raw_ticks=0 virtual_ticks=0\nVERDICT MATCH\n");
}

TEST(EmitReport, TextLines) {
  const auto text = emit_report(sample(), ReportFormat::Text);
  EXPECT_NE(text.find("EVENT kind=DISPATCH t=0 part=1 process=2 detail=\"priority=5\"\n"), std::string::npos);
  EXPECT_NE(text.find("EVENT kind=RESET t=7 part=1 process=- detail=\"memory poisoned\"\n"), std::string::npos);
  EXPECT_NE(text.find("VIOLATION kind=LEFT_REDZONE part=1 addr=0x1f size=1 access=W step=1 "
                      "detail=\"quote \\\" and \\\\\"\n"),
            std::string::npos);
  EXPECT_NE(text.find("step=- detail=\"late\""), std::string::npos);
  EXPECT_TRUE(text.ends_with("VERDICT MISMATCH missing=1 unexpected=2\n"));
}

TEST(EmitReport, JsonRoundTrip) {
  const auto r = sample();
  EXPECT_EQ(parse_report(emit_report(r, ReportFormat::Json)), r);
  EXPECT_EQ(report_from_json(report_to_json(RunReport{})), RunReport{});
}

TEST(EmitReport, MalformedJsonIsConfigError) {
  EXPECT_THROW(parse_report("{"), ConfigError);
  EXPECT_THROW(parse_report("{\"scenario\": 1}"), ConfigError);
}

TEST(ReportFormat, Parse) {
  EXPECT_EQ(parse_report_format("json"), ReportFormat::Json);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
}

TEST(KnownKinds, CoverEveryFamily) {
  const auto& kinds = known_violation_kinds();
  for (const char* k : {"LEFT_REDZONE", "WILD_ADDRESS", "UNINIT_SYSCALL_PRE", "SHIFT_RANGE",
                        "DEADLINE_MISS", "API_MISMATCH"})
    EXPECT_NE(std::find(kinds.begin(), kinds.end(), k), kinds.end()) << k;
}

#include <gtest/gtest.h>

#include "partsan/sched.hpp"

using namespace partsan;

TEST(Ratio, ParseAndScale) {
  EXPECT_EQ(Ratio::parse("3/2"), (Ratio{3, 2}));
  EXPECT_EQ(Ratio::parse("2").str(), "2");
  EXPECT_THROW(Ratio::parse("0"), ConfigError);
  EXPECT_THROW(Ratio::parse("x/2"), ConfigError);
  EXPECT_EQ((Ratio{3, 2}).scale_floor(5), 7u);
}

TEST(TimeModel, BaseStepAtFactorOne) {
  TimeModel tm(Ratio{1, 1}, CheckCosts{});
  tm.advance(1, {});
  EXPECT_EQ(tm.raw_ticks(), 1u);
  EXPECT_EQ(tm.virtual_now(), 1u);
}

TEST(TimeModel, OneCheckAtFactorTwo) {
  TimeModel tm(Ratio{2, 1}, CheckCosts{});
  tm.advance(1, CheckCounts{1, 0, 0});
  EXPECT_EQ(tm.raw_ticks(), 2u);
  EXPECT_EQ(tm.virtual_now(), 1u);
}

TEST(TimeModel, FortyInstrumentedSteps) {
  TimeModel tm(Ratio{2, 1}, CheckCosts{});
  for (int i = 0; i < 40; ++i) tm.advance(1, CheckCounts{1, 0, 0});
  EXPECT_EQ(tm.raw_ticks(), 80u);
  EXPECT_EQ(tm.virtual_now(), 40u);
}

TEST(TimeModel, AdvanceVirtualToFirstMatchingRawTick) {
  TimeModel tm(Ratio{3, 2}, CheckCosts{});
  tm.advance_virtual_to(10);
  EXPECT_EQ(tm.virtual_now(), 10u);
  EXPECT_EQ(tm.raw_ticks(), 15u);
  tm.advance_virtual_to(4);
  EXPECT_EQ(tm.raw_ticks(), 15u);
}

TEST(MajorFrame, CurrentWindow) {
  const MajorFrame frame(100, {{1, 0, 50}, {2, 50, 50}});
  auto w = frame.current_window(0);
  EXPECT_EQ(w.partition, 1u);
  EXPECT_EQ(w.remaining, 50u);
  w = frame.current_window(50);
  EXPECT_EQ(w.partition, 2u);
  EXPECT_EQ(w.remaining, 50u);
  w = frame.current_window(237);
  EXPECT_EQ(w.partition, 1u);
  EXPECT_EQ(w.remaining, 13u);
  w = frame.current_window(263);
  EXPECT_EQ(w.partition, 2u);
  EXPECT_EQ(w.remaining, 37u);
}

TEST(MajorFrame, DefectsAreReported) {
  EXPECT_THROW(MajorFrame(100, {}), ConfigError);
  EXPECT_THROW(MajorFrame(100, {{1, 0, 60}, {2, 50, 50}}), ConfigError);
  EXPECT_THROW(MajorFrame(100, {{1, 0, 40}, {2, 50, 50}}), ConfigError);
  const auto d = MajorFrame::find_defect(100, {{1, 0, 60}, {2, 50, 50}});
  ASSERT_TRUE(d);
  EXPECT_EQ(d->window_index, 1u);
}

TEST(MajorFrame, NextWindowStart) {
  const MajorFrame frame(100, {{1, 0, 50}, {2, 50, 50}});
  EXPECT_EQ(frame.next_window_start(2, 10), 50u);
  EXPECT_EQ(frame.next_window_start(1, 60), 100u);
  EXPECT_EQ(frame.next_window_start(1, 20), 20u);
  EXPECT_FALSE(frame.next_window_start(3, 0));
}

namespace {

ProcessTable table_with(std::initializer_list<std::pair<ProcessId, int>> procs) {
  ProcessTable t(1);
  for (auto [id, prio] : procs) {
    ProcessConfig c;
    c.id = id;
    c.partition = 1;
    c.time_capacity = 50;
    c.priority = prio;
    t.add(c);
  }
  return t;
}

}  // namespace

TEST(Dispatch, HighestPriorityWins) {
  auto t = table_with({{1, 5}, {2, 9}});
  t.release(1, 0);
  t.release(2, 0);
  EXPECT_EQ(dispatch(t), 2u);
  EXPECT_EQ(t.at(2).state, ProcessState::Running);
}

TEST(Dispatch, TieGoesToLowestId) {
  auto t = table_with({{1, 5}, {2, 5}});
  t.release(2, 0);
  t.release(1, 0);
  EXPECT_EQ(dispatch(t), 1u);
}

TEST(Dispatch, AllDormantIdles) {
  auto t = table_with({{1, 5}, {2, 9}});
  EXPECT_FALSE(dispatch(t));
}

TEST(Dispatch, DisplacedRunnerDropsToReady) {
  auto t = table_with({{1, 5}, {2, 9}});
  t.release(1, 0);
  EXPECT_EQ(dispatch(t), 1u);
  t.release(2, 3);
  EXPECT_EQ(dispatch(t), 2u);
  EXPECT_EQ(t.at(1).state, ProcessState::Ready);
  EXPECT_EQ(t.running(), 2u);
}

TEST(Deadline, CapacityFifty) {
  auto t = table_with({{1, 5}});
  t.release(1, 0);
  EXPECT_FALSE(check_deadline(t.at(1), 40));
  EXPECT_FALSE(check_deadline(t.at(1), 50));
  const auto miss = check_deadline(t.at(1), 80);
  ASSERT_TRUE(miss);
  EXPECT_EQ(miss->elapsed, 80u);
  EXPECT_EQ(miss->budget, 50u);
}

TEST(Deadline, OverrideDoublesBudget) {
  auto t = table_with({{1, 5}});
  t.release(1, 0);
  t.at(1).budget_multiplier = Ratio{2, 1};
  EXPECT_EQ(effective_budget(t.at(1)), 100u);
  EXPECT_FALSE(check_deadline(t.at(1), 80));
}

TEST(GetMyId, Modes) {
  EXPECT_EQ(get_my_id(std::nullopt), (GetMyIdResult{ReturnCode::NoError, kMainProcessId}));
  EXPECT_EQ(get_my_id(3u).id, 3u);
  EXPECT_EQ(get_my_id(std::nullopt, true).code, ReturnCode::InvalidMode);
  EXPECT_EQ(get_my_id(3u, true).id, 3u);
}

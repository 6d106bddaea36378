#include <gtest/gtest.h>

#include <algorithm>

#include "dftsim/error.hpp"
#include "dftsim/liveness.hpp"
#include "random_program.hpp"
#include "replay_oracle.hpp"
#include "test_util.hpp"

using namespace dftsim;
using namespace testutil;

namespace {

using Regs = std::vector<RegisterId>;

// p1 writes reg1 at cycle 0; p2 and p3 consume it at cycle 2; p4 spans 3..4.
Region four_ops() {
  return region(RegionKind::Straight, 1, 5, {"a"},
                {op("p1", Opcode::Pass, {"a"}, "reg1", 0, 0), op("p2", Opcode::Add, {"reg1", "a"}, "reg2", 2, 2),
                 op("p3", Opcode::Xor, {"reg1", "a"}, "reg3", 2, 2),
                 op("p4", Opcode::Mul, {"reg2", "reg3"}, "reg4", 3, 4)});
}

Function with_ffs(std::uint32_t count, std::uint32_t width) {
  Region r = region(RegionKind::Straight, 1, 1, {"a"}, {});
  Regs results;
  for (std::uint32_t i = 0; i < count; ++i) {
    r.ops.push_back(op("o" + std::to_string(i), Opcode::Pass, {"a"}, "r" + std::to_string(i), 0, 0, width));
    results.push_back(r.ops.back().output);
  }
  return function("F", {r}, results);
}

oracle::ReplayVerdict replay_with_table(const Program& p) {
  const auto& f = p.functions.front();
  const auto table = live_sets(f.region(), f.result_regs);
  return oracle::check_restore_replay(
      f.region(), p.inputs, [&](std::uint32_t n) { return table.restore_set(n); }, f.result_regs);
}

}  // namespace

TEST(LiveSets, FourOpScheduleCheckpoints) {
  const auto t = live_sets(four_ops(), {"reg4"});
  EXPECT_EQ(t.at(0), (Regs{"reg1"}));
  EXPECT_EQ(t.at(1), (Regs{"reg1"}));
  EXPECT_EQ(t.at(2), (Regs{"reg2", "reg3"}));
  EXPECT_EQ(t.at(3), (Regs{"reg2", "reg3"}));
  EXPECT_EQ(t.at(4), (Regs{"reg4"}));
  EXPECT_EQ(t.resume, (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
}

TEST(LiveSets, SingleResultOpAtCycleZero) {
  const auto t = live_sets(region(RegionKind::Straight, 1, 1, {"a"}, {op("p", Opcode::Pass, {"a"}, "x", 0, 0)}), {"x"});
  EXPECT_EQ(t.at(0), (Regs{"x"}));
}

TEST(LiveSets, UnwrittenRegistersNeverAppear) {
  const auto t = live_sets(four_ops(), {"reg4"});
  for (const auto& set : t.checkpoint) EXPECT_EQ(std::count(set.begin(), set.end(), "a"), 0);
}

TEST(LiveSets, LoopCarriedValueKeptAcrossTheBody) {
  auto r = region(RegionKind::Loop, 3, 4, {"acc", "k"},
                  {op("u", Opcode::Add, {"acc", "k"}, "tmp", 1, 1), op("w", Opcode::Pass, {"tmp"}, "acc", 3, 3)});
  const auto t = live_sets(r, {"acc"});
  // Before `u` reads it, the previous iteration's acc must survive.
  EXPECT_EQ(t.at(0), (Regs{"acc"}));
  EXPECT_EQ(t.at(2), (Regs{"tmp"}));
  EXPECT_EQ(t.at(3), (Regs{"acc"}));
}

TEST(ResumePoint, NoSpanningOpIsIdentity) {
  const auto r = four_ops();
  for (std::uint32_t n : {0u, 1u, 2u, 4u}) EXPECT_EQ(resume_point(r, n), n);
}

TEST(ResumePoint, SingleSpan) {
  auto r = region(RegionKind::Straight, 1, 6, {"a"}, {op("s", Opcode::Pass, {"a"}, "x", 3, 5)});
  EXPECT_EQ(resume_point(r, 4), 3u);
  EXPECT_EQ(resume_point(r, 5), 5u);
}

TEST(ResumePoint, OverlappingSpansTakeTheEarliestStart) {
  auto r = region(RegionKind::Straight, 1, 8, {"a"},
                  {op("s", Opcode::Pass, {"a"}, "x", 2, 6), op("t", Opcode::Pass, {"a"}, "y", 4, 7)});
  EXPECT_EQ(resume_point(r, 5), 2u);
  auto p = one_function(r, {"x", "y"}, {{"a", 11}});
  EXPECT_TRUE(replay_with_table(p).ok);
}

TEST(ResumePoint, AgreesWithOracleDefinition) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = oracle::random_region_program(s, 32);
    const auto& r = p.functions.front().region();
    for (std::uint32_t n = 0; n < r.body_length; ++n) {
      EXPECT_EQ(resume_point(r, n), oracle::resume_cycle(r, n));
      EXPECT_LE(resume_point(r, n), n);
    }
  }
}

TEST(TrackerSpec, Width8ForFullByteLoop) {
  auto f = function("F", {region(RegionKind::Loop, 255, 255, {"a"}, {op("p", Opcode::Pass, {"a"}, "x", 0, 0)})},
                    {"x"});
  const auto s = make_tracker_spec(f);
  EXPECT_EQ(s.width, 8u);
  EXPECT_EQ(s.capacity(), 65025u);
  EXPECT_EQ(s.iterations, 255u);
  EXPECT_EQ(s.count_max, 255u);
}

TEST(TrackerSpec, StraightBodyHasOneIteration) {
  auto f = function("F", {region(RegionKind::Straight, 1, 10, {"a"}, {op("p", Opcode::Pass, {"a"}, "x", 0, 9)})},
                    {"x"});
  const auto s = make_tracker_spec(f);
  EXPECT_EQ(s.iterations, 1u);
  EXPECT_EQ(s.count_max, 10u);
  EXPECT_EQ(s.width, 4u);
}

TEST(TrackerSpec, FifteenByFifteenFitsWidth4) {
  EXPECT_EQ(tracker_width(15, 15), 4u);
  EXPECT_EQ(max_trackable_cycles(tracker_width(15, 15)), 225u);
  EXPECT_EQ(tracker_width(16, 1), 5u);
  EXPECT_EQ(tracker_width(1, 65535), 16u);
}

TEST(TrackerSpec, WidthCoversBothCounters) {
  for (std::uint32_t t : {1u, 7u, 100u, 3000u})
    for (std::uint32_t c : {1u, 15u, 16u, 999u}) {
      const auto w = tracker_width(t, c);
      EXPECT_GE((1u << w) - 1, t);
      EXPECT_GE((1u << w) - 1, c);
      if (w > kMinTrackerWidth) EXPECT_LT((1u << (w - 1)) - 1, std::max(t, c));
    }
}

TEST(TrackerSpec, UntrackableLengthThrows) {
  EXPECT_THROW(tracker_width(70000, 1), ValidationError);
  EXPECT_THROW(tracker_width(1, 65536), ValidationError);
}

TEST(TrackingPolicy, FewNarrowRegistersStoreAll) {
  auto f = with_ffs(5, 1);
  TrackerSpec s;
  s.width = 8;
  EXPECT_EQ(tracking_policy(f, s), TrackingMode::StoreAll);
}

TEST(TrackingPolicy, WideFunctionIsTracked) {
  auto f = with_ffs(100, 30);
  EXPECT_EQ(register_flip_flops(f), 3000u);
  TrackerSpec s;
  s.width = 8;
  EXPECT_EQ(tracking_policy(f, s), TrackingMode::Tracked);
}

TEST(TrackingPolicy, TieGoesToStoreAll) {
  TrackerSpec s;
  s.width = 4;  // 15 FFs
  EXPECT_EQ(tracking_policy(with_ffs(15, 1), s), TrackingMode::StoreAll);
  EXPECT_EQ(tracking_policy(with_ffs(16, 1), s), TrackingMode::Tracked);
}

TEST(ControlFlipFlops, TrackedUsesTableAndStoreAllUsesFsmBits) {
  TrackerSpec s;
  s.width = 6;
  EXPECT_EQ(control_flip_flops(s), 21u);
  s.mode = TrackingMode::StoreAll;
  s.iterations = 1;
  s.count_max = 7;  // 8 positions -> 3 bits, plus two lock bits
  EXPECT_EQ(control_flip_flops(s), 5u);
}

TEST(RestoreSufficiency, FourOpSchedule) {
  auto p = one_function(four_ops(), {"reg4"}, {{"a", 9}});
  const auto v = replay_with_table(p);
  EXPECT_TRUE(v.ok) << v.failure;
  EXPECT_EQ(v.cases, 5u);
}

TEST(RestoreSufficiency, FiftyTwentyCycleSchedules) {
  oracle::RandomProgramOptions o;
  o.max_functions = 1;
  o.max_body = 20;
  o.max_ops = 14;
  o.max_span = 6;
  o.multi_cycle = 0.5;
  int checked = 0;
  for (std::uint64_t s = 0; checked < 50; ++s) {
    ASSERT_LT(s, 20000u);
    const auto p = oracle::random_program(s, o);
    if (p.functions.front().region().body_length != 20) continue;
    ++checked;
    const auto v = replay_with_table(p);
    EXPECT_TRUE(v.ok) << "seed " << s << ": " << v.failure;
  }
}

TEST(RestoreSufficiency, RandomRegionsUpTo64Cycles) {
  for (std::uint64_t s = 0; s < 150; ++s) {
    const auto p = oracle::random_region_program(1000 + s, 64);
    const auto v = replay_with_table(p);
    EXPECT_TRUE(v.ok) << "seed " << s << ": " << v.failure;
  }
}

TEST(RestoreMinimality, EveryRegisterOfAChainedScheduleIsNeeded) {
  // Each value feeds exactly the next stage, so no checkpoint entry is slack.
  auto r = region(RegionKind::Straight, 1, 9, {"a"},
                  {op("p1", Opcode::Pass, {"a"}, "reg1", 0, 0), op("p2", Opcode::Add, {"reg1", "a"}, "reg2", 2, 2),
                   op("p3", Opcode::Xor, {"reg1", "a"}, "reg3", 2, 2),
                   op("p4", Opcode::Mul, {"reg2", "reg3"}, "reg4", 3, 5),
                   op("p5", Opcode::Sub, {"reg4", "a"}, "reg5", 7, 8)});
  const Regs results = {"reg5"};
  const auto table = live_sets(r, results);
  for (std::uint32_t n = 0; n < r.body_length; ++n) {
    const auto full = table.restore_set(n);
    for (const auto& drop : full) {
      Regs keep;
      for (const auto& reg : full)
        if (reg != drop) keep.push_back(reg);
      const auto v = oracle::check_restore_replay(
          r, {{"a", 5}}, [&](std::uint32_t m) { return m == n ? keep : table.restore_set(m); }, results);
      EXPECT_FALSE(v.ok) << "dropping " << drop << " at cycle " << n << " went unnoticed";
    }
  }
}

TEST(RestoreMinimality, MostSingleDropsAreDetectedOnRandomSchedules) {
  std::uint64_t drops = 0, detected = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto p = oracle::random_region_program(s, 16);
    const auto& f = p.functions.front();
    const auto table = live_sets(f.region(), f.result_regs);
    for (std::uint32_t n = 0; n < f.region().body_length; ++n)
      for (const auto& drop : table.restore_set(n)) {
        Regs keep;
        for (const auto& reg : table.restore_set(n))
          if (reg != drop) keep.push_back(reg);
        ++drops;
        const auto v = oracle::check_restore_replay(
            f.region(), p.inputs, [&](std::uint32_t m) { return m == n ? keep : table.restore_set(m); },
            f.result_regs);
        if (!v.ok) ++detected;
      }
  }
  ASSERT_GT(drops, 0u);
  EXPECT_GT(static_cast<double>(detected) / static_cast<double>(drops), 0.5);
}

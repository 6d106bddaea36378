#include <gtest/gtest.h>

#include <map>

#include "dftsim/analysis.hpp"
#include "dftsim/error.hpp"
#include "dftsim/placement.hpp"
#include "random_program.hpp"
#include "test_util.hpp"

using namespace dftsim;
using namespace testutil;

namespace {

Program narrow_registers(std::uint32_t count) {
  Region r = region(RegionKind::Straight, 1, 1, {"a"}, {});
  for (std::uint32_t i = 0; i < count; ++i)
    r.ops.push_back(op("o" + std::to_string(i), Opcode::Pass, {"a"}, "r" + std::to_string(i), 0, 0, 1));
  return one_function(r, {}, {{"a", 1}});
}

TrackerSpec store_all(const FunctionId& id) {
  TrackerSpec s;
  s.function = id;
  s.mode = TrackingMode::StoreAll;
  return s;
}

}  // namespace

TEST(Placement, EightOneBitRegistersShareOneSlice) {
  auto pl = assign_slices(narrow_registers(8), {});
  EXPECT_EQ(pl.register_slices, 1u);
  for (const auto& [reg, v] : pl.registers) EXPECT_EQ(v, (std::vector<SliceAddress>{{0, 0}})) << reg;
}

TEST(Placement, NinthRegisterOpensASecondSlice) {
  auto pl = assign_slices(narrow_registers(9), {});
  EXPECT_EQ(pl.register_slices, 2u);
}

TEST(Placement, SixteenFlipFlopsPerSlice) {
  GridConfig g;
  g.ffs_per_slice = 16;
  EXPECT_EQ(assign_slices(narrow_registers(16), {}, g).register_slices, 1u);
  EXPECT_EQ(assign_slices(narrow_registers(17), {}, g).register_slices, 2u);
}

TEST(Placement, GoldenDump) {
  Program p;
  p.inputs = {{"i", 0}};
  p.functions.push_back(function(
      "B", {region(RegionKind::Straight, 1, 1, {"i"}, {op("bz", Opcode::Pass, {"i"}, "z", 0, 0, 1)})}, {"z"}));
  p.functions.push_back(function("A",
                                 {region(RegionKind::Straight, 1, 1, {"i"},
                                         {op("ay", Opcode::Pass, {"i"}, "y", 0, 0, 3),
                                          op("ax", Opcode::Pass, {"i"}, "x", 0, 0, 12)})},
                                 {"x", "y"}));
  GridConfig g;
  g.width = 2;
  g.height = 10;
  auto pl = assign_slices(p, {store_all("B"), store_all("A")}, g);
  EXPECT_EQ(dump(pl),
            "reg x -> X0Y0,X1Y0\n"
            "reg y -> X1Y0\n"
            "reg z -> X1Y0\n"
            "tracker A -> X0Y1\n"
            "tracker B -> X0Y1\n");
  EXPECT_EQ(pl.register_slices, 2u);
  EXPECT_EQ(pl.tracker_slices, 1u);
}

TEST(Placement, Deterministic) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto a = analyze(oracle::random_program(s));
    auto b = analyze(oracle::random_program(s));
    EXPECT_EQ(dump(a.placement), dump(b.placement));
  }
}

TEST(Placement, SliceCapacityAndTotality) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto a = analyze(oracle::random_program(s));
    std::map<SliceAddress, std::uint32_t> load;
    std::uint64_t total = 0;
    for (const auto& f : a.program.functions)
      for (const auto& op : f.region().ops) {
        ASSERT_FALSE(a.placement.slices_of(op.output).empty());
        total += op.width;
      }
    for (const auto& [reg, v] : a.placement.registers)
      for (auto addr : v) load[addr] += 1;  // each register fragment holds at least one FF
    const auto ffs = a.placement.grid.ffs_per_slice;
    EXPECT_EQ(a.placement.register_slices, (total + ffs - 1) / ffs);
    for (const auto& [addr, n] : load) EXPECT_LE(n, a.placement.grid.ffs_per_slice);
    // Tracker SLICEs never host program registers.
    for (const auto& [fid, v] : a.placement.trackers)
      for (auto addr : v) EXPECT_EQ(load.count(addr), 0u) << fid;
    for (const auto& live : a.live)
      for (const auto& set : live.checkpoint)
        for (const auto& reg : set) EXPECT_NO_THROW(a.placement.slices_of(reg));
  }
}

TEST(Placement, BadFlipFlopCountIsConfigError) {
  GridConfig g;
  g.ffs_per_slice = 4;
  EXPECT_THROW(assign_slices(narrow_registers(1), {}, g), ConfigError);
  g.ffs_per_slice = 8;
  g.width = 0;
  EXPECT_THROW(assign_slices(narrow_registers(1), {}, g), ConfigError);
}

TEST(Placement, OverflowIsPlacementError) {
  GridConfig g;
  g.width = 1;
  g.height = 1;
  EXPECT_NO_THROW(assign_slices(narrow_registers(8), {}, g));
  EXPECT_THROW(assign_slices(narrow_registers(9), {}, g), PlacementError);
}

TEST(Placement, UnplacedRegisterLookupThrows) {
  auto pl = assign_slices(narrow_registers(2), {});
  EXPECT_THROW(pl.slices_of("nope"), PlacementError);
  EXPECT_EQ(to_string(SliceAddress{12, 7}), "X12Y7");
}

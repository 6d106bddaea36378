#include <gtest/gtest.h>

#include <algorithm>

#include "dftsim/error.hpp"
#include "dftsim/program.hpp"
#include "random_program.hpp"
#include "test_util.hpp"

using namespace dftsim;
using testutil::one_function;
using testutil::op;

namespace {

bool has_kind(const std::vector<Violation>& v, const std::string& kind) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

const char* kMinimal = R"({
  "functions": [{
    "id": "F1", "result_regs": ["s"],
    "regions": [{"kind": "straight", "iterations": 1, "body_length": 1, "live_in": ["a", "b"],
                 "ops": [{"id": "add", "opcode": "add", "inputs": ["a", "b"], "output": "s", "start": 0, "end": 0}]}]
  }],
  "dependencies": [],
  "inputs": {"a": 3, "b": 4}
})";

}  // namespace

TEST(Parse, MinimalProgramHasOneFunction) {
  auto p = parse_program(kMinimal);
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.functions[0].id, "F1");
  EXPECT_TRUE(validate(p).empty());
}

TEST(Parse, RoundTripIsStable) {
  auto p = parse_program(kMinimal);
  auto text = to_json(p);
  EXPECT_EQ(parse_program(text), p);
  EXPECT_EQ(to_json(parse_program(text)), text);
}

TEST(Parse, RandomProgramsRoundTrip) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    auto p = oracle::random_program(s);
    EXPECT_EQ(parse_program(to_json(p)), p) << s;
  }
}

TEST(Parse, CyclicDependenciesAreRejected) {
  auto doc = R"({"functions": [
      {"id": "F1", "result_regs": [], "regions": [{"kind": "straight", "iterations": 1, "body_length": 1, "live_in": [], "ops": []}]},
      {"id": "F2", "result_regs": [], "regions": [{"kind": "straight", "iterations": 1, "body_length": 1, "live_in": [], "ops": []}]}],
    "dependencies": [["F2", "F1"], ["F1", "F2"]]})";
  EXPECT_THROW(parse_program(doc), SchemaError);
}

TEST(Parse, ErrorsCarryLocation) {
  auto doc = R"({"functions": [{"id": "F1", "result_regs": [], "regions": [
      {"kind": "straight", "iterations": 1, "body_length": 1, "live_in": [],
       "ops": [{"id": "x", "opcode": "frobnicate", "inputs": [], "output": "r", "start": 0, "end": 0}]}]}],
    "dependencies": []})";
  try {
    parse_program(doc);
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_NE(e.where().find("/functions/0/regions/0/ops/0"), std::string::npos) << e.where();
  }
}

TEST(Parse, UnknownKeysAndDanglingReferences) {
  EXPECT_THROW(parse_program(R"({"functions": [], "dependencies": [], "extra": 1})"), SchemaError);
  EXPECT_THROW(parse_program(R"({"functions": [], "dependencies": [["A", "B"]]})"), SchemaError);
  EXPECT_THROW(parse_program("{not json"), SchemaError);
}

TEST(Parse, DependencyObjectsAndMainItems) {
  auto doc = R"({"functions": [
      {"id": "F1", "result_regs": ["x"], "regions": [{"kind": "straight", "iterations": 1, "body_length": 1, "live_in": [],
        "ops": [{"id": "c", "opcode": "const", "inputs": [], "output": "x", "start": 0, "end": 0, "imm": 9}]}]}],
    "dependencies": [],
    "main": [{"call": "F1"}, {"loose": {"kind": "straight", "iterations": 1, "body_length": 1, "live_in": ["x"],
        "ops": [{"id": "p", "opcode": "pass", "inputs": ["x"], "output": "y", "start": 0, "end": 0}]}}]})";
  auto p = parse_program(doc);
  ASSERT_EQ(p.main.size(), 2u);
  EXPECT_TRUE(validate(p).empty());
  auto out = execute_reference(p);
  EXPECT_EQ(out.at("y"), 9u);
}

TEST(Program, EntrySetHoldsParallelStarters) {
  Program p;
  for (auto id : {"F1", "F2", "F3"}) {
    Function f;
    f.id = id;
    f.regions.push_back(Region{});
    p.functions.push_back(f);
  }
  p.dependencies.push_back({"F1", "F2"});
  auto entry = p.entry_set();
  std::sort(entry.begin(), entry.end());
  EXPECT_EQ(entry, (std::vector<FunctionId>{"F1", "F3"}));
  EXPECT_EQ(p.predecessors("F2"), (std::vector<FunctionId>{"F1"}));
}

TEST(Validate, ValidProgramHasNoViolations) { EXPECT_TRUE(validate(parse_program(kMinimal)).empty()); }

TEST(Validate, SameCycleReadIsUseBeforeDef) {
  Region r;
  r.body_length = 2;
  r.live_in = {"a"};
  r.ops = {op("p", Opcode::Pass, {"a"}, "x", 0, 0), op("q", Opcode::Pass, {"x"}, "y", 0, 1)};
  auto v = validate(one_function(r, {"y"}, {{"a", 1}}));
  EXPECT_TRUE(has_kind(v, "use-before-def"));
}

TEST(Validate, EndPastBodyIsScheduleOverflow) {
  Region r;
  r.body_length = 2;
  r.live_in = {"a"};
  r.ops = {op("p", Opcode::Pass, {"a"}, "x", 0, 2)};
  EXPECT_TRUE(has_kind(validate(one_function(r, {"x"}, {{"a", 1}})), "schedule overflow"));
}

TEST(Validate, StructuralViolations) {
  Region r;
  r.body_length = 3;
  r.live_in = {"a"};
  r.ops = {op("p", Opcode::Pass, {"a"}, "x", 0, 0), op("p", Opcode::Add, {"a"}, "x", 1, 1)};
  auto v = validate(one_function(r, {"nope"}, {{"a", 1}}));
  EXPECT_TRUE(has_kind(v, "duplicate op"));
  EXPECT_TRUE(has_kind(v, "multiple writers"));
  EXPECT_TRUE(has_kind(v, "arity"));
  EXPECT_TRUE(has_kind(v, "unknown result register"));
  for (const auto& x : v) EXPECT_FALSE(x.entity.empty());
}

TEST(Validate, LoopCarriedWriteMustCloseTheBody) {
  Region r;
  r.kind = RegionKind::Loop;
  r.iterations = 2;
  r.body_length = 3;
  r.live_in = {"acc", "step"};
  r.ops = {op("a", Opcode::Add, {"acc", "step"}, "acc", 0, 1)};
  EXPECT_TRUE(has_kind(validate(one_function(r, {"acc"}, {{"acc", 0}, {"step", 1}})),
                      "loop-carried write not at body end"));
}

TEST(Validate, ReadingAnUnexportedRegister) {
  Program p;
  Function a;
  a.id = "A";
  Region ra;
  ra.live_in = {"i"};
  ra.ops = {op("a0", Opcode::Pass, {"i"}, "hidden", 0, 0)};
  a.regions = {ra};
  Function b;
  b.id = "B";
  Region rb;
  rb.live_in = {"hidden"};
  rb.ops = {op("b0", Opcode::Pass, {"hidden"}, "out", 0, 0)};
  b.regions = {rb};
  b.result_regs = {"out"};
  p.functions = {a, b};
  p.dependencies = {{"A", "B"}};
  p.inputs = {{"i", 1}};
  EXPECT_TRUE(has_kind(validate(p), "unexported register"));
}

TEST(Reference, PassCopiesInput) {
  Region r;
  r.live_in = {"a"};
  r.ops = {op("p", Opcode::Pass, {"a"}, "x", 0, 0)};
  EXPECT_EQ(execute_reference(one_function(r, {"x"}, {{"a", 7}})).at("x"), 7u);
}

TEST(Reference, SingleCycleAdd) { EXPECT_EQ(execute_reference(parse_program(kMinimal)).at("s"), 7u); }

TEST(Reference, LoopCarriedAccumulator) {
  Region r;
  r.kind = RegionKind::Loop;
  r.iterations = 3;
  r.body_length = 1;
  r.live_in = {"acc", "step"};
  r.ops = {op("a", Opcode::Add, {"acc", "step"}, "acc", 0, 0)};
  EXPECT_EQ(execute_reference(one_function(r, {"acc"}, {{"acc", 0}, {"step", 5}})).at("acc"), 15u);
}

TEST(Reference, ArithmeticWraps) {
  Region r;
  r.body_length = 2;
  r.live_in = {"a", "b"};
  r.ops = {op("m", Opcode::Mul, {"a", "b"}, "x", 0, 0), op("s", Opcode::Sub, {"b", "a"}, "y", 0, 1),
           op("k", Opcode::Xor, {"x", "a"}, "z", 1, 1)};
  auto out = execute_reference(one_function(r, {"x", "y", "z"}, {{"a", 0x80000001u}, {"b", 4}}));
  EXPECT_EQ(out.at("x"), 4u);
  EXPECT_EQ(out.at("y"), 4u - 0x80000001u);
  EXPECT_EQ(out.at("z"), 4u ^ 0x80000001u);
}

TEST(Reference, MultiCycleOpLatchesAtStart) {
  // The slow op latches `a` before the loop-carried update at the body end
  // lands, so it sees the previous iteration's value.
  Region r;
  r.kind = RegionKind::Loop;
  r.iterations = 2;
  r.body_length = 3;
  r.live_in = {"a"};
  r.ops = {op("slow", Opcode::Pass, {"a"}, "seen", 0, 2), op("inc", Opcode::Add, {"a", "a"}, "a", 1, 2)};
  auto out = execute_reference(one_function(r, {"seen", "a"}, {{"a", 3}}));
  EXPECT_EQ(out.at("seen"), 6u);
  EXPECT_EQ(out.at("a"), 12u);
}

TEST(Reference, UnboundLiveInThrows) {
  Region r;
  r.live_in = {"a"};
  r.ops = {op("p", Opcode::Pass, {"a"}, "x", 0, 0)};
  EXPECT_THROW(execute_reference(one_function(r, {"x"}, {})), ValidationError);
}

TEST(Reference, DeterministicAcrossRuns) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto p = oracle::random_program(s);
    EXPECT_EQ(execute_reference(p), execute_reference(p));
  }
}

TEST(Topology, KahnOrderRespectsEdges) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    auto p = oracle::random_program(s);
    auto order = topological_order(p);
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& d : p.dependencies) EXPECT_LT(pos[p.index_of(d.from)], pos[p.index_of(d.to)]);
  }
}

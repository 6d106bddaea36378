#pragma once

// Scheduled-program IR: the stand-in for HLS output. A program is a DAG of
// functions; every function owns one or more regions (a loop body or a
// straight-line block) whose operations are pinned to body cycles.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dftsim {

using FunctionId = std::string;
using RegisterId = std::string;
using OperationId = std::string;

enum class Opcode { Const, Pass, Add, Sub, Mul, Xor };
enum class RegionKind { Loop, Straight };

std::string_view to_string(Opcode op);
std::optional<Opcode> opcode_from_string(std::string_view s);
/// Number of register inputs the opcode consumes.
std::size_t arity(Opcode op);
/// 32-bit wrapping semantics of every opcode.
std::uint32_t evaluate(Opcode op, std::span<const std::uint32_t> args, std::uint32_t imm);

struct Operation {
  OperationId id;
  Opcode opcode = Opcode::Pass;
  std::vector<RegisterId> inputs;
  RegisterId output;
  std::uint32_t start = 0;
  std::uint32_t end = 0;  // inclusive; output visible at end + 1
  std::uint32_t imm = 0;  // only read by Const
  std::uint32_t width = 32;  // flip-flops holding the output register

  std::uint32_t span() const { return end - start; }
  bool operator==(const Operation&) const = default;
};

struct Region {
  RegionKind kind = RegionKind::Straight;
  std::uint32_t iterations = 1;
  std::uint32_t body_length = 1;
  std::vector<RegisterId> live_in;
  std::vector<Operation> ops;

  bool operator==(const Region&) const = default;
};

struct Function {
  FunctionId id;
  std::vector<Region> regions;
  std::vector<RegisterId> result_regs;
  bool loose = false;  // synthesized from main-level operations

  const Region& region() const { return regions.front(); }
  bool operator==(const Function&) const = default;
};

struct Dependency {
  FunctionId from;
  FunctionId to;
  bool operator==(const Dependency&) const = default;
};

/// One entry of the raw main-level sequence.
struct Call {
  FunctionId function;
  bool operator==(const Call&) const = default;
};
using MainItem = std::variant<Call, Region>;

using RegisterValues = std::map<RegisterId, std::uint32_t>;
/// Values of all result registers after a complete run.
using FinalState = std::map<RegisterId, std::uint32_t>;

struct Program {
  std::vector<Function> functions;
  std::vector<Dependency> dependencies;
  /// Raw programs only: calls interleaved with loose operation blocks.
  std::vector<MainItem> main;
  /// Default bindings for program inputs and loop-carried initial values.
  RegisterValues inputs;

  const Function* find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // npos if absent
  std::vector<FunctionId> predecessors(std::string_view id) const;
  std::vector<FunctionId> entry_set() const;
  /// Every function has one region and there is no loose main-level code.
  bool is_normalized() const;

  bool operator==(const Program&) const = default;
};

Program parse_program(std::string_view text);
Program load_program(const std::string& path);
std::string to_json(const Program& program);

struct Violation {
  std::string kind;    // e.g. "use-before-def", "schedule overflow"
  std::string entity;  // offending function/op/register id
  std::string message;
};

std::vector<Violation> validate(const Program& program);

/// Deterministic Kahn order; ties broken by declaration order. Throws on cycles.
std::vector<std::size_t> topological_order(const Program& program);

/// Runs the program to completion without outages.
FinalState execute_reference(const Program& program, const RegisterValues& inputs);
FinalState execute_reference(const Program& program);

/// Registers written by any op of the region.
std::vector<RegisterId> written_registers(const Region& region);
/// Live-ins of the region that the region itself also writes.
std::vector<RegisterId> loop_carried(const Region& region);
/// Sum of output widths over every op in the function.
std::uint64_t register_flip_flops(const Function& function);
/// Observable registers: result regs of all functions plus everything written by loose blocks.
std::vector<RegisterId> observable_registers(const Program& program);

}  // namespace dftsim

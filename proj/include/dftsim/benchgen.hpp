#pragma once

// Synthetic scheduled programs with benchmark-like shapes: a chain of states,
// each one function with a single region of random dataflow.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dftsim/program.hpp"

namespace dftsim {

struct BenchmarkShape {
  std::string name = "bench";
  std::uint32_t states = 1;
  RegionKind kind = RegionKind::Loop;
  std::uint32_t body_min = 4, body_max = 8;       // body length, inclusive
  std::uint32_t iter_min = 1, iter_max = 1;       // ignored for straight regions
  std::uint32_t regs_min = 2, regs_max = 6;       // operations (one register each) per state
  std::vector<std::uint32_t> widths{32};          // register widths to draw from
  double multi_cycle_fraction = 0.0;
  std::uint32_t max_span = 1;
  std::uint32_t ops_per_cycle = 4;                // issue slots per body cycle
  std::uint64_t seed = 1;

  bool operator==(const BenchmarkShape&) const = default;
};

/// Deterministic in the shape (including seed). Throws ConfigError for an
/// infeasible or malformed shape.
Program generate(const BenchmarkShape& shape);

BenchmarkShape parse_shape(std::string_view json_text);
BenchmarkShape load_shape(const std::string& path);
std::string shape_to_json(const BenchmarkShape& shape);

/// adpcm, aes, gsm, float, global, struct.
const std::vector<std::string>& preset_names();
/// Throws ConfigError for an unknown name.
BenchmarkShape preset(std::string_view name);

}  // namespace dftsim

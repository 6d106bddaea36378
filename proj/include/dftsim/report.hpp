#pragma once

// analyze / simulate / compare front ends and their file outputs.
//
// Exit statuses: 0 success, 2 invalid program, 3 crash-consistency
// violation, 4 bad configuration.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dftsim/power_sim.hpp"

namespace dftsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInconsistent = 3;
inline constexpr int kExitConfig = 4;

/// Name of the environment variable giving the default output directory.
inline constexpr const char* kOutEnv = "DFTSIM_OUT";

struct RunConfig {
  std::string program_path;           // either this ...
  std::vector<std::string> presets;   // ... or preset names ("all" expands)
  std::vector<PolicyKind> policies{PolicyKind::DFT, PolicyKind::CP};
  std::uint32_t k_min = 1;
  std::uint32_t k_max = 10;
  std::uint32_t rounds = 10;
  std::uint64_t seed = 1;
  GridConfig grid;
  CostModel cost;
  std::string out_dir;  // empty: $DFTSIM_OUT, else "dftsim-out"
  unsigned threads = 0;
};

/// "A..B" or "K". Throws ConfigError.
std::pair<std::uint32_t, std::uint32_t> parse_outage_range(const std::string& text);
/// "WxH". Throws ConfigError.
std::pair<std::uint32_t, std::uint32_t> parse_grid(const std::string& text);

std::string resolve_out_dir(const RunConfig& config);

struct Benchmark {
  std::string name;
  Program program;
};

/// The program file (named after its stem) or every requested preset.
/// Throws ConfigError when neither or both are given.
std::vector<Benchmark> load_benchmarks(const RunConfig& config);

/// Writes normalized.json, analysis.json, placement.txt and control_unit.bin
/// (one set per benchmark, prefixed by its name when there are several).
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);

/// One run per policy with k = k_min (k_min must equal k_max) and the trace
/// seeded by config.seed. Writes simulate.json.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Monte Carlo grid over every benchmark. Writes rollback.csv, ffstores.csv, bram.csv.
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& value);
/// Fixed six-decimal rendering with '.' as separator.
std::string csv_number(double value);

}  // namespace dftsim

#pragma once

// Test-side random program generator. Unlike benchgen it builds DAGs of
// functions (so several can run at once), several loop-carried registers per
// region, and dense multi-cycle operations.

#include <cstdint>

#include "dftsim/program.hpp"

namespace oracle {

struct RandomProgramOptions {
  std::uint32_t max_functions = 4;
  std::uint32_t max_body = 16;
  std::uint32_t max_iterations = 3;
  std::uint32_t max_ops = 10;
  std::uint32_t max_span = 4;
  std::uint32_t max_carried = 2;
  double multi_cycle = 0.4;
  double edge = 0.4;
};

/// Always returns a program that passes validate().
dftsim::Program random_program(std::uint64_t seed, const RandomProgramOptions& opt = {});

/// A raw program exercising normalization: a main sequence mixing calls and
/// loose blocks, and functions with several regions.
dftsim::Program random_raw_program(std::uint64_t seed);

/// A single valid region (wrapped in a one-function program).
dftsim::Program random_region_program(std::uint64_t seed, std::uint32_t max_body);

}  // namespace oracle

#pragma once

// Deterministic synthetic placement: flip-flops of program registers are
// packed into SLICEs in row-major grid order, trackers follow in SLICEs of
// their own.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dftsim/liveness.hpp"
#include "dftsim/program.hpp"

namespace dftsim {

struct SliceAddress {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  auto operator<=>(const SliceAddress&) const = default;
};

std::string to_string(SliceAddress a);  // "X<x>Y<y>"

struct GridConfig {
  std::uint32_t width = 100;
  std::uint32_t height = 100;
  std::uint32_t ffs_per_slice = 8;

  std::uint64_t slices() const { return std::uint64_t{width} * height; }
  std::uint64_t flip_flops() const { return slices() * ffs_per_slice; }
};

struct Placement {
  GridConfig grid;
  std::map<RegisterId, std::vector<SliceAddress>> registers;
  /// Tracker (or StoreAll control state) flip-flops per function.
  std::map<FunctionId, std::vector<SliceAddress>> trackers;
  std::uint64_t register_slices = 0;  // SLICEs hosting program registers
  std::uint64_t tracker_slices = 0;

  const std::vector<SliceAddress>& slices_of(const RegisterId& reg) const;
};

/// Throws ConfigError for a bad grid and PlacementError("placement overflow")
/// when the grid runs out of SLICEs.
Placement assign_slices(const Program& program, const std::vector<TrackerSpec>& specs,
                        const GridConfig& grid = {});

/// `reg <id> -> X<k>Y<m>[,...]` lines, then `tracker <id> -> ...` lines.
std::string dump(const Placement& placement);

}  // namespace dftsim

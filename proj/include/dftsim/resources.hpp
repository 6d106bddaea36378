#pragma once

// Resource figures for trackers and the control unit measured on an
// xc7z020clg484 (4..9 bit rows), with a linear FF extrapolation beyond 9 bits.

#include <cstdint>

namespace dftsim {

struct TrackerCost {
  std::uint32_t ff = 0;
  std::uint32_t lut = 0;
  bool operator==(const TrackerCost&) const = default;
};

struct ControlUnitCost {
  std::uint32_t ff = 0;
  std::uint32_t lut = 0;
  std::uint32_t bram = 0;
  bool operator==(const ControlUnitCost&) const = default;
};

struct ChipTotals {
  std::uint32_t ff = 106400;
  std::uint32_t lut = 53200;
  std::uint32_t bram = 280;
  std::uint32_t slice = 13300;
};

inline constexpr std::uint32_t kMinTrackerWidth = 4;
inline constexpr std::uint32_t kMaxTrackerWidth = 16;
inline constexpr std::uint32_t kMaxTableWidth = 9;

/// Width 4..16. Throws ConfigError outside the range.
TrackerCost tracker_resources(std::uint32_t width);
/// Width 4..9 (measured range only). Throws ConfigError outside the range.
ControlUnitCost cu_resources(std::uint32_t width);
/// Longest function a tracker of this width can follow: (2^n - 1)^2.
std::uint64_t max_trackable_cycles(std::uint32_t width);

/// Bundles the tables with chip totals so callers can swap in another device.
struct ResourceModel {
  ChipTotals chip;
  TrackerCost tracker(std::uint32_t width) const { return tracker_resources(width); }
  ControlUnitCost control_unit(std::uint32_t width) const { return cu_resources(width); }
};

}  // namespace dftsim

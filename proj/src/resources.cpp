#include "dftsim/resources.hpp"

#include <array>
#include <string>

#include "dftsim/error.hpp"

namespace dftsim {

namespace {

// Rows for widths 4..9.
constexpr std::array<TrackerCost, 6> kTracker = {{
    {15, 90}, {18, 102}, {21, 102}, {24, 102}, {27, 102}, {30, 110},
}};

// Below 8 bits the address table is folded into logic, hence no BRAM.
constexpr std::array<ControlUnitCost, 6> kControlUnit = {{
    {52, 138, 0}, {52, 142, 0}, {52, 150, 0}, {52, 166, 0}, {36, 134, 2}, {36, 134, 2},
}};

}  // namespace

TrackerCost tracker_resources(std::uint32_t width) {
  if (width < kMinTrackerWidth || width > kMaxTrackerWidth)
    throw ConfigError("tracker width " + std::to_string(width) + " outside 4..16");
  if (width <= kMaxTableWidth) return kTracker[width - kMinTrackerWidth];
  return {15 + 3 * (width - 4), 110};
}

ControlUnitCost cu_resources(std::uint32_t width) {
  if (width < kMinTrackerWidth || width > kMaxTableWidth)
    throw ConfigError("control-unit width " + std::to_string(width) + " outside 4..9");
  return kControlUnit[width - kMinTrackerWidth];
}

std::uint64_t max_trackable_cycles(std::uint32_t width) {
  const std::uint64_t top = (std::uint64_t{1} << width) - 1;
  return top * top;
}

}  // namespace dftsim

#pragma once

// cu_BRAM model: rows of SLICE addresses indexed by f_status + offset.
//
// Row 0 lists the tracker region (always stored). Each function then owns a
// contiguous block starting at its base: base + 0 is the reserved zero row,
// base + s (s = 1..count_max) lists the SLICEs holding the restore set for a
// tracker that completed body cycle s - 1. StoreAll functions own a single
// data row at base + 1 holding every SLICE of the function.
//
// Serialized layout (little-endian):
//   "DFCU" u16 version=1 u16 entry_width
//   u32 row_count u32 pool_count u32 tracker_count
//   tracker_count x { u32 base, u32 rows (incl. zero row), u8 mode, u16 id_len, id bytes }
//   row_count x { u32 start, u32 length }            -- directory
//   pool_count x { u16 x, u16 y }                     -- address pool

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dftsim/liveness.hpp"
#include "dftsim/placement.hpp"

namespace dftsim {

struct TrackerRows {
  FunctionId function;
  std::uint32_t base = 0;
  std::uint32_t rows = 0;  // including the zero row
  TrackingMode mode = TrackingMode::Tracked;
  bool operator==(const TrackerRows&) const = default;
};

struct ControlUnitTable {
  std::vector<SliceAddress> tracker_region;
  std::vector<TrackerRows> trackers;
  std::vector<std::vector<SliceAddress>> rows;
  std::uint32_t entry_width = 32;

  const TrackerRows* find(std::string_view function) const;
  std::uint64_t pool_entries() const;
  bool operator==(const ControlUnitTable&) const = default;
};

/// `specs` and `live` are parallel to program.functions.
ControlUnitTable build_table(const Program& program, const std::vector<TrackerSpec>& specs,
                             const Placement& placement, const std::vector<LiveSetTable>& live);

using StatusMap = std::map<FunctionId, std::uint32_t>;

/// Tracker region plus the row of every tracker with a nonzero status,
/// deduplicated and sorted. Throws CorruptionError for out-of-range statuses.
std::vector<SliceAddress> lookup(const ControlUnitTable& table, const StatusMap& statuses);

inline constexpr std::uint32_t kBramBits = 18432;
inline constexpr std::uint32_t kDirectoryEntryBits = 32;
/// Tables shallower than this are folded into logic (no BRAM).
inline constexpr std::uint32_t kLogicDepth = 128;

std::uint64_t stored_bits(const ControlUnitTable& table);
std::uint32_t bram_usage(const ControlUnitTable& table);

std::vector<std::uint8_t> serialize(const ControlUnitTable& table);
ControlUnitTable deserialize(std::span<const std::uint8_t> bytes);

}  // namespace dftsim

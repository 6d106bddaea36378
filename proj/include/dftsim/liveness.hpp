#pragma once

// Offline mapping from body cycles to the registers a resume needs
// (checkpoint sets), multi-cycle roll-back points, and tracker sizing.

#include <cstdint>
#include <vector>

#include "dftsim/program.hpp"
#include "dftsim/resources.hpp"

namespace dftsim {

/// Indexed by body cycle n; "at cycle n" means after cycle n has executed.
struct LiveSetTable {
  std::uint32_t body_length = 0;
  std::vector<std::vector<RegisterId>> checkpoint;  // sorted per cycle
  std::vector<std::uint32_t> resume;                // r(n) <= n

  const std::vector<RegisterId>& at(std::uint32_t n) const { return checkpoint.at(n); }
  /// Registers a restore needs when interrupted after cycle n.
  const std::vector<RegisterId>& restore_set(std::uint32_t n) const {
    return checkpoint.at(resume.at(n));
  }
};

/// A register written by the region belongs to checkpoint_n when
///  - its op ends at n, or
///  - it feeds an op spanning n (start <= n < end), or
///  - it is written at or before n and read by an op starting after n, or is a
///    result / loop-carried value (needed after the body), or
///  - it is a loop-carried value from the previous iteration still to be read
///    after n.
/// Registers the region does not write are never included.
LiveSetTable live_sets(const Region& region);

/// Earliest start over ops spanning n, or n when none does.
std::uint32_t resume_point(const Region& region, std::uint32_t n);

/// The same table but treating `results` as consumed after the body.
LiveSetTable live_sets(const Region& region, const std::vector<RegisterId>& results);

enum class TrackingMode { Tracked, StoreAll };

struct TrackerSpec {
  FunctionId function;
  std::uint32_t iterations = 1;
  std::uint32_t count_max = 1;
  std::uint32_t width = kMinTrackerWidth;
  TrackingMode mode = TrackingMode::Tracked;

  std::uint64_t capacity() const { return max_trackable_cycles(width); }
  bool operator==(const TrackerSpec&) const = default;
};

/// Smallest width in 4..16 with 2^n - 1 >= max(t, count_max).
/// Throws ValidationError("untrackable length") beyond 16 bits.
std::uint32_t tracker_width(std::uint32_t iterations, std::uint32_t count_max);

/// StoreAll when a tracker costs at least as many flip-flops as the function's registers.
TrackingMode tracking_policy(const Function& function, const TrackerSpec& candidate,
                             const ResourceModel& model = {});

/// Sizes the tracker of a normalized function and picks its mode.
TrackerSpec make_tracker_spec(const Function& function, const ResourceModel& model = {});

/// Flip-flops the tracker region spends on this function: the tracker itself
/// when tracked, or the FSM control state (lock bits + position) when not.
std::uint32_t control_flip_flops(const TrackerSpec& spec);

}  // namespace dftsim

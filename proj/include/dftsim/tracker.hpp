#pragma once

// Cycle-accurate tracker state machines and the lock chain between them.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dftsim/control_unit.hpp"
#include "dftsim/liveness.hpp"

namespace dftsim {

enum class Phase { Idle, Running, Done };

struct TrackerState {
  TrackerSpec spec;
  std::uint32_t count = 0;  // body cycle executing / last executed
  std::uint32_t iter = 0;   // completed iterations
  Phase phase = Phase::Idle;
  bool lock_head = false;
  bool lock_tail = false;
  std::uint32_t status = 0;  // last emitted f_status

  bool operator==(const TrackerState&) const = default;
};

TrackerState make_tracker(const TrackerSpec& spec, bool entry);

/// Entry trackers have lock_head pre-set; others need every predecessor's lock_tail.
bool can_start(const TrackerState& tracker, std::span<const bool> predecessor_tails);

/// Idle -> Running. Throws ContractViolation on any other phase.
TrackerState start(TrackerState tracker);

/// Advances one body cycle; wraps into the next iteration and finishes after
/// the last one (Done, lock_tail set, status cleared).
TrackerState tick(TrackerState tracker);

/// f_status a tracker emits on power loss: 0 when Idle/Done, otherwise
/// count + 1 (tracked) or 1 (StoreAll) so that 0 always means "no action".
std::uint32_t status_of(const TrackerState& tracker);

/// All trackers of a program, wired together by the dependency lock chain.
class TrackerArray {
 public:
  TrackerArray() = default;
  /// specs parallel to program.functions.
  TrackerArray(const Program& program, const std::vector<TrackerSpec>& specs);

  std::size_t size() const { return trackers_.size(); }
  const TrackerState& operator[](std::size_t i) const { return trackers_[i]; }
  TrackerState& operator[](std::size_t i) { return trackers_[i]; }
  const std::vector<TrackerState>& trackers() const { return trackers_; }
  const std::vector<std::size_t>& predecessors(std::size_t i) const { return preds_[i]; }

  /// Refreshes lock_head of Idle trackers and starts those that may start.
  /// Returns the indices that entered Running.
  std::vector<std::size_t> start_ready();
  /// Ticks every Running tracker.
  void tick_running();
  bool all_done() const;

  /// Latches and returns every tracker's f_status.
  StatusMap snapshot();

 private:
  std::vector<TrackerState> trackers_;
  std::vector<std::vector<std::size_t>> preds_;
};

/// Rebuilds the tracker array after power returns. Tracker registers come
/// back exactly as stored; every Running tracker's count is rolled back to
/// resume[status - 1]. `resume` maps function id -> r(n) per body cycle.
/// Throws CorruptionError if a status cannot belong to its tracker.
TrackerArray restore(TrackerArray stored, const StatusMap& statuses,
                     const std::map<FunctionId, std::vector<std::uint32_t>>& resume);

}  // namespace dftsim

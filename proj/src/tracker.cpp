#include "dftsim/tracker.hpp"

#include <algorithm>
#include <memory>

#include "dftsim/error.hpp"

namespace dftsim {

TrackerState make_tracker(const TrackerSpec& spec, bool entry) {
  TrackerState t;
  t.spec = spec;
  t.lock_head = entry;
  return t;
}

bool can_start(const TrackerState& t, std::span<const bool> tails) {
  if (t.phase != Phase::Idle) return false;
  if (tails.empty()) return t.lock_head;
  return std::all_of(tails.begin(), tails.end(), [](bool b) { return b; });
}

TrackerState start(TrackerState t) {
  if (t.phase != Phase::Idle) throw ContractViolation("start on a tracker that is not idle");
  t.phase = Phase::Running;
  t.lock_head = true;
  t.count = 0;
  t.iter = 0;
  return t;
}

TrackerState tick(TrackerState t) {
  if (t.phase != Phase::Running)
    throw ContractViolation("tick on a tracker that is not running: " + t.spec.function);
  if (t.count + 1 < t.spec.count_max) {
    ++t.count;
    return t;
  }
  t.count = 0;
  if (++t.iter == t.spec.iterations) {
    t.phase = Phase::Done;
    t.lock_tail = true;
    t.status = 0;
  }
  return t;
}

std::uint32_t status_of(const TrackerState& t) {
  if (t.phase != Phase::Running) return 0;
  return t.spec.mode == TrackingMode::StoreAll ? 1 : t.count + 1;
}

TrackerArray::TrackerArray(const Program& program, const std::vector<TrackerSpec>& specs) {
  if (specs.size() != program.functions.size())
    throw ContractViolation("TrackerArray: one spec per function required");
  preds_.resize(program.functions.size());
  for (const auto& d : program.dependencies) {
    auto a = program.index_of(d.from);
    auto b = program.index_of(d.to);
    if (std::find(preds_[b].begin(), preds_[b].end(), a) == preds_[b].end()) preds_[b].push_back(a);
  }
  for (std::size_t i = 0; i < specs.size(); ++i)
    trackers_.push_back(make_tracker(specs[i], preds_[i].empty()));
}

std::vector<std::size_t> TrackerArray::start_ready() {
  std::vector<std::size_t> started;
  // Tails are sampled once so a tracker finishing this cycle cannot chain
  // through several successors in the same cycle.
  std::unique_ptr<bool[]> tails(new bool[trackers_.size() + 1]);
  for (std::size_t i = 0; i < trackers_.size(); ++i) tails[i] = trackers_[i].lock_tail;
  std::unique_ptr<bool[]> mine(new bool[trackers_.size() + 1]);
  for (std::size_t i = 0; i < trackers_.size(); ++i) {
    auto& t = trackers_[i];
    if (t.phase != Phase::Idle) continue;
    const auto& preds = preds_[i];
    for (std::size_t k = 0; k < preds.size(); ++k) mine[k] = tails[preds[k]];
    std::span<const bool> view(mine.get(), preds.size());
    if (!preds.empty()) t.lock_head = std::all_of(view.begin(), view.end(), [](bool b) { return b; });
    if (can_start(t, view)) {
      t = start(t);
      started.push_back(i);
    }
  }
  return started;
}

void TrackerArray::tick_running() {
  for (auto& t : trackers_)
    if (t.phase == Phase::Running) t = tick(t);
}

bool TrackerArray::all_done() const {
  return std::all_of(trackers_.begin(), trackers_.end(),
                     [](const TrackerState& t) { return t.phase == Phase::Done; });
}

StatusMap TrackerArray::snapshot() {
  StatusMap out;
  for (auto& t : trackers_) {
    t.status = status_of(t);
    out[t.spec.function] = t.status;
  }
  return out;
}

TrackerArray restore(TrackerArray stored, const StatusMap& statuses,
                     const std::map<FunctionId, std::vector<std::uint32_t>>& resume) {
  for (std::size_t i = 0; i < stored.size(); ++i) {
    auto& t = stored[i];
    auto it = statuses.find(t.spec.function);
    const std::uint32_t s = it == statuses.end() ? 0 : it->second;
    if (t.phase != Phase::Running) {
      if (s != 0) throw CorruptionError("nonzero status for inactive tracker " + t.spec.function);
      continue;
    }
    if (s == 0 || s > t.spec.count_max)
      throw CorruptionError("status " + std::to_string(s) + " outside 1.." +
                            std::to_string(t.spec.count_max) + " for " + t.spec.function);
    if (t.spec.mode == TrackingMode::Tracked && s != t.count + 1)
      throw CorruptionError("status disagrees with stored counter for " + t.spec.function);
    auto rp = resume.find(t.spec.function);
    if (rp == resume.end() || rp->second.size() != t.spec.count_max)
      throw ContractViolation("missing resume points for " + t.spec.function);
    t.count = rp->second[t.count];
    t.status = s;
  }
  return stored;
}

}  // namespace dftsim

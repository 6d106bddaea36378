#include "dftsim/liveness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "dftsim/error.hpp"

namespace dftsim {

std::uint32_t resume_point(const Region& region, std::uint32_t n) {
  std::uint32_t r = n;
  for (const auto& op : region.ops)
    if (op.start <= n && n < op.end) r = std::min(r, op.start);
  return r;
}

LiveSetTable live_sets(const Region& region) { return live_sets(region, {}); }

LiveSetTable live_sets(const Region& region, const std::vector<RegisterId>& results) {
  const auto L = region.body_length;
  LiveSetTable t;
  t.body_length = L;
  t.checkpoint.resize(L);
  t.resume.resize(L);

  const std::set<RegisterId> result_set(results.begin(), results.end());
  const auto carried = loop_carried(region);
  const std::set<RegisterId> carried_set(carried.begin(), carried.end());

  struct Uses {
    const Operation* writer = nullptr;
    std::vector<const Operation*> readers;
  };
  std::unordered_map<RegisterId, Uses> regs;
  for (const auto& op : region.ops) regs[op.output].writer = &op;
  for (const auto& op : region.ops)
    for (const auto& in : op.inputs)
      if (auto it = regs.find(in); it != regs.end()) it->second.readers.push_back(&op);

  for (std::uint32_t n = 0; n < L; ++n) {
    std::set<RegisterId> live;
    for (const auto& [reg, use] : regs) {
      const auto e = use.writer->end;
      bool needed = e == n;
      for (const auto* rd : use.readers) {
        if (needed) break;
        const bool spanning = rd->start <= n && n < rd->end;
        // Current-iteration value (written before the reader starts).
        const bool reads_new = rd->start > e;
        if (spanning) needed = true;
        else if (reads_new && e <= n && rd->start > n) needed = true;
        else if (!reads_new && carried_set.count(reg) && e > n && rd->start > n) needed = true;
      }
      if (!needed && e <= n && (result_set.count(reg) || carried_set.count(reg))) needed = true;
      if (needed) live.insert(reg);
    }
    t.checkpoint[n].assign(live.begin(), live.end());
    t.resume[n] = resume_point(region, n);
  }
  return t;
}

std::uint32_t tracker_width(std::uint32_t iterations, std::uint32_t count_max) {
  const std::uint64_t need = std::max(iterations, count_max);
  for (std::uint32_t w = kMinTrackerWidth; w <= kMaxTrackerWidth; ++w)
    if ((std::uint64_t{1} << w) - 1 >= need) return w;
  throw ValidationError("untrackable length: " + std::to_string(need) +
                        " exceeds the 16-bit tracker ceiling");
}

TrackingMode tracking_policy(const Function& function, const TrackerSpec& candidate,
                             const ResourceModel& model) {
  const auto tracker_ff = model.tracker(candidate.width).ff;
  return tracker_ff >= register_flip_flops(function) ? TrackingMode::StoreAll
                                                     : TrackingMode::Tracked;
}

TrackerSpec make_tracker_spec(const Function& function, const ResourceModel& model) {
  if (function.regions.size() != 1)
    throw ContractViolation("make_tracker_spec needs a normalized function: " + function.id);
  const auto& r = function.region();
  TrackerSpec s;
  s.function = function.id;
  s.iterations = r.iterations;
  s.count_max = r.body_length;
  s.width = tracker_width(r.iterations, r.body_length);
  s.mode = tracking_policy(function, s, model);
  return s;
}

std::uint32_t control_flip_flops(const TrackerSpec& spec) {
  if (spec.mode == TrackingMode::Tracked) return tracker_resources(spec.width).ff;
  const auto positions = std::uint64_t{spec.iterations} * spec.count_max;
  std::uint32_t bits = 0;
  while ((std::uint64_t{1} << bits) < positions + 1) ++bits;
  return 2 + bits;
}

}  // namespace dftsim

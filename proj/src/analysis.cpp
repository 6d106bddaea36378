#include "dftsim/analysis.hpp"

#include <algorithm>

#include "dftsim/error.hpp"

namespace dftsim {

namespace {

void require_valid(const Program& p, const char* what) {
  auto v = validate(p);
  if (v.empty()) return;
  throw ValidationError(std::string(what) + ": " + v.front().kind + " (" + v.front().entity +
                        "): " + v.front().message);
}

}  // namespace

std::map<FunctionId, std::vector<std::uint32_t>> Analysis::resume_points() const {
  std::map<FunctionId, std::vector<std::uint32_t>> out;
  for (std::size_t i = 0; i < program.functions.size(); ++i)
    out[program.functions[i].id] = live[i].resume;
  return out;
}

std::uint64_t Analysis::tracker_flip_flops() const {
  std::uint64_t n = 0;
  for (const auto& s : specs) n += control_flip_flops(s);
  return n;
}

std::uint32_t Analysis::max_span() const {
  std::uint32_t m = 0;
  for (const auto& f : program.functions)
    for (const auto& r : f.regions)
      for (const auto& op : r.ops) m = std::max(m, op.span());
  return m;
}

Analysis analyze(const Program& raw, const GridConfig& grid, const ResourceModel& model) {
  require_valid(raw, "invalid program");
  Analysis a;
  a.raw = raw;
  a.reference = execute_reference(raw);
  a.model = model;
  auto norm = normalize(raw);
  a.program = std::move(norm.program);
  a.renaming = std::move(norm.renaming);
  require_valid(a.program, "normalization produced an invalid program");
  for (const auto& f : a.program.functions) {
    a.live.push_back(live_sets(f.region(), f.result_regs));
    a.specs.push_back(make_tracker_spec(f, model));
  }
  a.placement = assign_slices(a.program, a.specs, grid);
  a.table = build_table(a.program, a.specs, a.placement, a.live);
  return a;
}

}  // namespace dftsim

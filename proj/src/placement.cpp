#include "dftsim/placement.hpp"

#include <algorithm>
#include <sstream>

#include "dftsim/error.hpp"

namespace dftsim {

std::string to_string(SliceAddress a) {
  return "X" + std::to_string(a.x) + "Y" + std::to_string(a.y);
}

const std::vector<SliceAddress>& Placement::slices_of(const RegisterId& reg) const {
  auto it = registers.find(reg);
  if (it == registers.end()) throw PlacementError("unplaced register '" + reg + "'");
  return it->second;
}

namespace {

class SlicePacker {
 public:
  explicit SlicePacker(const GridConfig& g) : grid_(g) {}

  // Claims `ffs` consecutive flip-flops; returns the SLICEs they touch.
  std::vector<SliceAddress> take(std::uint32_t ffs) {
    std::vector<SliceAddress> out;
    while (ffs > 0) {
      if (slice_ >= grid_.slices()) throw PlacementError("placement overflow: grid exhausted");
      const auto room = grid_.ffs_per_slice - used_;
      const auto n = std::min(room, ffs);
      out.push_back(address(slice_));
      used_ += n;
      ffs -= n;
      if (used_ == grid_.ffs_per_slice) {
        ++slice_;
        used_ = 0;
      }
    }
    return out;
  }

  // Moves to a fresh SLICE unless the current one is untouched.
  void align() {
    if (used_ > 0) {
      ++slice_;
      used_ = 0;
    }
  }

  std::uint64_t slices_started() const { return slice_ + (used_ > 0 ? 1 : 0); }

 private:
  SliceAddress address(std::uint64_t s) const {
    return {static_cast<std::uint16_t>(s % grid_.width), static_cast<std::uint16_t>(s / grid_.width)};
  }

  GridConfig grid_;
  std::uint64_t slice_ = 0;
  std::uint32_t used_ = 0;
};

}  // namespace

Placement assign_slices(const Program& program, const std::vector<TrackerSpec>& specs,
                        const GridConfig& grid) {
  if (grid.ffs_per_slice != 8 && grid.ffs_per_slice != 16)
    throw ConfigError("ffs_per_slice must be 8 or 16");
  if (grid.width == 0 || grid.height == 0 || grid.width > 65536 || grid.height > 65536)
    throw ConfigError("grid dimensions must be in 1..65536");

  Placement p;
  p.grid = grid;
  SlicePacker packer(grid);

  std::vector<const Function*> fns;
  for (const auto& f : program.functions) fns.push_back(&f);
  std::sort(fns.begin(), fns.end(), [](auto* a, auto* b) { return a->id < b->id; });

  for (const auto* f : fns) {
    std::map<RegisterId, std::uint32_t> regs;  // sorted by id
    for (const auto& r : f->regions)
      for (const auto& op : r.ops) regs[op.output] = op.width;
    for (const auto& [reg, width] : regs) p.registers[reg] = packer.take(width);
  }
  p.register_slices = packer.slices_started();

  packer.align();
  std::vector<const TrackerSpec*> sorted;
  for (const auto& s : specs) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->function < b->function; });
  for (const auto* s : sorted) {
    auto& slot = p.trackers[s->function];
    for (auto a : packer.take(control_flip_flops(*s)))
      if (slot.empty() || slot.back() != a) slot.push_back(a);
  }
  p.tracker_slices = packer.slices_started() - p.register_slices;
  return p;
}

std::string dump(const Placement& p) {
  std::ostringstream os;
  auto line = [&](const char* kind, const std::string& id, const std::vector<SliceAddress>& v) {
    os << kind << ' ' << id << " -> ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << to_string(v[i]);
    os << '\n';
  };
  for (const auto& [reg, v] : p.registers) line("reg", reg, v);
  for (const auto& [fid, v] : p.trackers) line("tracker", fid, v);
  return os.str();
}

}  // namespace dftsim

#include "dftsim/control_unit.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "dftsim/error.hpp"

namespace dftsim {

const TrackerRows* ControlUnitTable::find(std::string_view function) const {
  for (const auto& t : trackers)
    if (t.function == function) return &t;
  return nullptr;
}

std::uint64_t ControlUnitTable::pool_entries() const {
  std::uint64_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

namespace {

std::vector<SliceAddress> slices_for(const std::vector<RegisterId>& regs, const Placement& pl) {
  std::set<SliceAddress> s;
  for (const auto& reg : regs) {
    const auto& v = pl.slices_of(reg);
    s.insert(v.begin(), v.end());
  }
  return {s.begin(), s.end()};
}

}  // namespace

ControlUnitTable build_table(const Program& program, const std::vector<TrackerSpec>& specs,
                             const Placement& placement, const std::vector<LiveSetTable>& live) {
  ControlUnitTable t;
  if (program.functions.empty()) return t;
  if (specs.size() != program.functions.size() || live.size() != program.functions.size())
    throw ContractViolation("build_table: specs/live tables must match the functions");

  std::set<SliceAddress> region;
  for (const auto& [fid, v] : placement.trackers) region.insert(v.begin(), v.end());
  t.tracker_region.assign(region.begin(), region.end());
  t.rows.push_back(t.tracker_region);

  for (std::size_t i = 0; i < program.functions.size(); ++i) {
    const auto& f = program.functions[i];
    const auto& spec = specs[i];
    TrackerRows tr{f.id, static_cast<std::uint32_t>(t.rows.size()), 0, spec.mode};
    t.rows.emplace_back();  // zero row
    if (spec.mode == TrackingMode::StoreAll) {
      t.rows.push_back(slices_for(written_registers(f.region()), placement));
    } else {
      for (std::uint32_t s = 1; s <= spec.count_max; ++s)
        t.rows.push_back(slices_for(live[i].restore_set(s - 1), placement));
    }
    tr.rows = static_cast<std::uint32_t>(t.rows.size()) - tr.base;
    t.trackers.push_back(std::move(tr));
  }
  return t;
}

std::vector<SliceAddress> lookup(const ControlUnitTable& table, const StatusMap& statuses) {
  std::set<SliceAddress> out(table.tracker_region.begin(), table.tracker_region.end());
  for (const auto& [fid, status] : statuses) {
    if (status == 0) continue;
    const auto* tr = table.find(fid);
    if (!tr) throw CorruptionError("status reported for unknown tracker '" + fid + "'");
    if (status >= tr->rows)
      throw CorruptionError("status " + std::to_string(status) + " outside the rows of '" + fid + "'");
    const auto& row = table.rows[tr->base + status];
    out.insert(row.begin(), row.end());
  }
  return {out.begin(), out.end()};
}

std::uint64_t stored_bits(const ControlUnitTable& table) {
  return table.rows.size() * std::uint64_t{kDirectoryEntryBits} +
         table.pool_entries() * table.entry_width;
}

std::uint32_t bram_usage(const ControlUnitTable& table) {
  if (table.rows.size() < kLogicDepth) return 0;
  return static_cast<std::uint32_t>((stored_bits(table) + kBramBits - 1) / kBramBits);
}

// ---- binary layout ----------------------------------------------------------

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    u8(v & 0xFF);
    u8(v >> 8);
  }
  void u32(std::uint32_t v) {
    u16(v & 0xFFFF);
    u16(v >> 16);
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) throw CorruptionError("control-unit image truncated");
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (u8() << 8));
  }
  std::uint32_t u32() {
    std::uint32_t lo = u16();
    return lo | (std::uint32_t{u16()} << 16);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const ControlUnitTable& t) {
  Writer w;
  for (char c : {'D', 'F', 'C', 'U'}) w.u8(static_cast<std::uint8_t>(c));
  w.u16(1);
  w.u16(static_cast<std::uint16_t>(t.entry_width));
  w.u32(static_cast<std::uint32_t>(t.rows.size()));
  w.u32(static_cast<std::uint32_t>(t.pool_entries()));
  w.u32(static_cast<std::uint32_t>(t.trackers.size()));
  for (const auto& tr : t.trackers) {
    w.u32(tr.base);
    w.u32(tr.rows);
    w.u8(tr.mode == TrackingMode::Tracked ? 0 : 1);
    w.u16(static_cast<std::uint16_t>(tr.function.size()));
    for (char c : tr.function) w.u8(static_cast<std::uint8_t>(c));
  }
  std::uint32_t start = 0;
  for (const auto& row : t.rows) {
    w.u32(start);
    w.u32(static_cast<std::uint32_t>(row.size()));
    start += static_cast<std::uint32_t>(row.size());
  }
  for (const auto& row : t.rows)
    for (auto a : row) {
      w.u16(a.x);
      w.u16(a.y);
    }
  return std::move(w.out);
}

ControlUnitTable deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  for (auto& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, "DFCU", 4) != 0) throw CorruptionError("bad control-unit magic");
  if (r.u16() != 1) throw CorruptionError("unsupported control-unit version");
  ControlUnitTable t;
  t.entry_width = r.u16();
  const auto nrows = r.u32();
  const auto npool = r.u32();
  const auto ntrackers = r.u32();
  for (std::uint32_t i = 0; i < ntrackers; ++i) {
    TrackerRows tr;
    tr.base = r.u32();
    tr.rows = r.u32();
    tr.mode = r.u8() == 0 ? TrackingMode::Tracked : TrackingMode::StoreAll;
    std::string id(r.u16(), '\0');
    for (auto& c : id) c = static_cast<char>(r.u8());
    tr.function = std::move(id);
    t.trackers.push_back(std::move(tr));
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dir(nrows);
  for (auto& [s, n] : dir) {
    s = r.u32();
    n = r.u32();
  }
  std::vector<SliceAddress> pool(npool);
  for (auto& a : pool) {
    a.x = r.u16();
    a.y = r.u16();
  }
  if (!r.done()) throw CorruptionError("trailing bytes after control-unit image");
  for (auto [s, n] : dir) {
    if (std::uint64_t{s} + n > pool.size()) throw CorruptionError("directory entry outside pool");
    t.rows.emplace_back(pool.begin() + s, pool.begin() + s + n);
  }
  if (!t.rows.empty()) t.tracker_region = t.rows.front();
  return t;
}

}  // namespace dftsim

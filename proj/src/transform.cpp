#include "dftsim/transform.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "dftsim/error.hpp"

namespace dftsim {

namespace {

void add_edge(std::vector<Dependency>& deps, const FunctionId& a, const FunctionId& b) {
  Dependency d{a, b};
  if (a != b && std::find(deps.begin(), deps.end(), d) == deps.end()) deps.push_back(d);
}

// Concatenate straight-line blocks back to back.
Region concatenate(const std::vector<const Region*>& blocks) {
  if (blocks.size() == 1) return *blocks.front();
  Region out;
  out.kind = RegionKind::Straight;
  out.iterations = 1;
  out.body_length = 0;
  std::set<RegisterId> written;
  for (const auto* b : blocks) {
    for (const auto& reg : b->live_in)
      if (!written.count(reg) &&
          std::find(out.live_in.begin(), out.live_in.end(), reg) == out.live_in.end())
        out.live_in.push_back(reg);
    for (auto op : b->ops) {
      op.start += out.body_length;
      op.end += out.body_length;
      written.insert(op.output);
      out.ops.push_back(std::move(op));
    }
    out.body_length += b->body_length;
  }
  return out;
}

}  // namespace

SplitResult split(const Function& f) {
  SplitResult out;
  if (f.regions.size() <= 1) {
    out.fragments.push_back(f);
    return out;
  }
  std::unordered_map<RegisterId, std::size_t> producer;
  for (std::size_t i = 0; i < f.regions.size(); ++i)
    for (const auto& op : f.regions[i].ops) producer.emplace(op.output, i);

  // Registers each region must export to later fragments.
  std::vector<std::set<RegisterId>> exports(f.regions.size());
  for (std::size_t i = 0; i < f.regions.size(); ++i) {
    for (const auto& reg : f.regions[i].live_in) {
      auto it = producer.find(reg);
      if (it == producer.end() || it->second == i) continue;
      if (it->second > i)
        throw ValidationError("split dataflow break: region " + std::to_string(i) + " of " + f.id +
                              " reads '" + reg + "' which is produced by a later region");
      exports[it->second].insert(reg);
    }
  }
  for (std::size_t i = 0; i < f.regions.size(); ++i) {
    Function frag;
    frag.id = f.id + "__s" + std::to_string(i);
    frag.regions = {f.regions[i]};
    frag.loose = f.loose;
    for (const auto& res : f.result_regs)
      if (producer.count(res) && producer.at(res) == i) frag.result_regs.push_back(res);
    for (const auto& reg : exports[i])
      if (std::find(frag.result_regs.begin(), frag.result_regs.end(), reg) == frag.result_regs.end())
        frag.result_regs.push_back(reg);
    if (i > 0) out.chain.push_back({out.fragments.back().id, frag.id});
    out.fragments.push_back(std::move(frag));
  }
  return out;
}

Program merge(const Program& p) {
  if (p.main.empty()) return p;
  Program out;
  out.inputs = p.inputs;
  out.dependencies = p.dependencies;

  // Owner of every register written anywhere, by final function id.
  std::unordered_map<RegisterId, FunctionId> owner;
  std::vector<std::pair<FunctionId, std::vector<RegisterId>>> reads;  // function -> cross-function live-ins

  std::vector<FunctionId> seq;  // main order after wrapping
  std::size_t run_index = 0;
  for (std::size_t i = 0; i < p.main.size();) {
    if (auto* c = std::get_if<Call>(&p.main[i])) {
      out.functions.push_back(*p.find(c->function));
      seq.push_back(c->function);
      ++i;
      continue;
    }
    // A run of consecutive straight blocks; loop blocks stand alone.
    std::vector<const Region*> blocks;
    while (i < p.main.size() && std::holds_alternative<Region>(p.main[i])) {
      const auto& r = std::get<Region>(p.main[i]);
      if (r.kind == RegionKind::Loop && !blocks.empty()) break;
      blocks.push_back(&r);
      ++i;
      if (r.kind == RegionKind::Loop) break;
    }
    Function fn;
    fn.id = "main__m" + std::to_string(run_index++);
    fn.loose = true;
    fn.regions = {concatenate(blocks)};
    fn.result_regs = written_registers(fn.regions.front());
    seq.push_back(fn.id);
    out.functions.push_back(std::move(fn));
  }

  for (const auto& f : out.functions) {
    std::vector<RegisterId> live;
    for (const auto& r : f.regions) {
      for (const auto& op : r.ops) owner.emplace(op.output, f.id);
      live.insert(live.end(), r.live_in.begin(), r.live_in.end());
    }
    reads.emplace_back(f.id, std::move(live));
  }

  // Positional edges around wrapped runs.
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto* f = out.find(seq[k]);
    if (!f->loose) continue;
    for (std::size_t j = k; j-- > 0;) {
      if (!out.find(seq[j])->loose) {
        add_edge(out.dependencies, seq[j], seq[k]);
        break;
      }
    }
    for (std::size_t j = k + 1; j < seq.size(); ++j) {
      if (!out.find(seq[j])->loose) {
        add_edge(out.dependencies, seq[k], seq[j]);
        break;
      }
    }
  }
  // Data edges: every cross-function read is ordered by the DAG alone.
  for (const auto& [fid, live] : reads) {
    for (const auto& reg : live) {
      auto it = owner.find(reg);
      if (it != owner.end() && it->second != fid) add_edge(out.dependencies, it->second, fid);
    }
  }
  return out;
}

Normalized normalize(const Program& p) {
  Program merged = merge(p);
  Normalized out;
  out.program.inputs = merged.inputs;
  std::map<FunctionId, std::pair<FunctionId, FunctionId>> ends;  // first, last fragment
  for (const auto& f : merged.functions) {
    auto s = split(f);
    auto& names = out.renaming[f.id];
    for (auto& frag : s.fragments) {
      names.push_back(frag.id);
      out.program.functions.push_back(std::move(frag));
    }
    for (auto& d : s.chain) add_edge(out.program.dependencies, d.from, d.to);
    ends[f.id] = {names.front(), names.back()};
  }
  for (const auto& d : merged.dependencies)
    add_edge(out.program.dependencies, ends.at(d.from).second, ends.at(d.to).first);
  return out;
}

}  // namespace dftsim

#include "random_program.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace oracle {

using namespace dftsim;

namespace {

struct Gen {
  std::mt19937_64 eng;
  std::uint64_t below(std::uint64_t n) { return eng() % n; }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return static_cast<double>(eng() % 1000000) < p * 1000000.0; }
};

Function make_function(Gen& g, const RandomProgramOptions& o, const std::string& id,
                       const std::vector<RegisterId>& upstream, Program& p) {
  Region r;
  r.iterations = static_cast<std::uint32_t>(g.between(1, o.max_iterations));
  r.kind = r.iterations > 1 || g.chance(0.5) ? RegionKind::Loop : RegionKind::Straight;
  r.body_length = static_cast<std::uint32_t>(g.between(1, o.max_body));
  const auto L = r.body_length;

  const RegisterId in = id + "_in";
  p.inputs[in] = static_cast<std::uint32_t>(g.eng());
  r.live_in.push_back(in);
  for (const auto& u : upstream)
    if (g.chance(0.7)) r.live_in.push_back(u);

  std::vector<RegisterId> carried;
  if (r.kind == RegionKind::Loop) {
    const auto nc = g.between(0, o.max_carried);
    for (std::uint64_t c = 0; c < nc; ++c) {
      carried.push_back(id + "_lc" + std::to_string(c));
      p.inputs[carried.back()] = static_cast<std::uint32_t>(g.eng());
      r.live_in.push_back(carried.back());
    }
  }

  struct Slot {
    std::uint32_t start, end;
    RegisterId out;
  };
  std::vector<Slot> slots;
  const auto m = g.between(1, o.max_ops);
  for (std::uint64_t j = 0; j < m; ++j) {
    const auto s = static_cast<std::uint32_t>(g.below(L));
    std::uint32_t span = 0;
    if (s + 1 < L && g.chance(o.multi_cycle))
      span = static_cast<std::uint32_t>(g.between(1, std::min<std::uint32_t>(o.max_span, L - 1 - s)));
    slots.push_back({s, s + span, id + "_v" + std::to_string(j)});
  }
  for (const auto& c : carried) {
    std::uint32_t span = 0;
    if (L > 1 && g.chance(o.multi_cycle))
      span = static_cast<std::uint32_t>(g.between(1, std::min<std::uint32_t>(o.max_span, L - 1)));
    slots.push_back({L - 1 - span, L - 1, c});
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.start < b.start; });

  std::set<RegisterId> read;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const auto& sl = slots[j];
    std::vector<RegisterId> pool = r.live_in;
    for (const auto& other : slots)
      if (other.end < sl.start && other.out.find("_lc") == std::string::npos) pool.push_back(other.out);
    Operation op;
    op.id = id + "_op" + std::to_string(j);
    op.output = sl.out;
    op.start = sl.start;
    op.end = sl.end;
    op.width = static_cast<std::uint32_t>(g.between(1, 20));
    static constexpr Opcode kOps[] = {Opcode::Add, Opcode::Sub, Opcode::Mul, Opcode::Xor, Opcode::Pass,
                                      Opcode::Const};
    op.opcode = kOps[g.below(6)];
    const auto imm = static_cast<std::uint32_t>(g.eng());
    if (op.opcode == Opcode::Const) op.imm = imm;
    for (std::size_t a = 0; a < arity(op.opcode); ++a) {
      // Lean on the most recent values to build longer live ranges.
      const auto& pick = g.chance(0.5) && pool.size() > r.live_in.size()
                             ? pool[r.live_in.size() + g.below(pool.size() - r.live_in.size())]
                             : pool[g.below(pool.size())];
      op.inputs.push_back(pick);
    }
    read.insert(op.inputs.begin(), op.inputs.end());
    r.ops.push_back(std::move(op));
  }

  Function f;
  f.id = id;
  for (const auto& op : r.ops)
    if (std::find(carried.begin(), carried.end(), op.output) != carried.end() || !read.count(op.output) ||
        g.chance(0.3))
      f.result_regs.push_back(op.output);
  f.regions.push_back(std::move(r));
  return f;
}

}  // namespace

Program random_program(std::uint64_t seed, const RandomProgramOptions& o) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Gen g{std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + attempt)};
    Program p;
    const auto nf = g.between(1, o.max_functions);
    for (std::uint64_t i = 0; i < nf; ++i) {
      const FunctionId id = "f" + std::to_string(i);
      std::vector<RegisterId> upstream;
      for (std::uint64_t j = 0; j < i; ++j)
        if (g.chance(o.edge)) {
          p.dependencies.push_back({p.functions[j].id, id});
          for (const auto& res : p.functions[j].result_regs) upstream.push_back(res);
        }
      p.functions.push_back(make_function(g, o, id, upstream, p));
    }
    if (validate(p).empty()) return p;
  }
  throw std::runtime_error("random_program: no valid program for seed " + std::to_string(seed));
}

Program random_raw_program(std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    RandomProgramOptions o;
    o.max_functions = 5;
    o.edge = 1.0;
    o.max_body = 8;
    auto base = random_program(seed * 31 + attempt, o);
    Gen g{std::mt19937_64(seed ^ (0xC0FFEEull + attempt))};

    std::vector<Function> fused;
    for (std::size_t i = 0; i < base.functions.size(); ++i) {
      auto f = base.functions[i];
      if (i + 1 < base.functions.size() && g.chance(0.35)) {
        const auto& next = base.functions[++i];
        f.regions.push_back(next.region());
        f.result_regs.insert(f.result_regs.end(), next.result_regs.begin(), next.result_regs.end());
      }
      fused.push_back(std::move(f));
    }
    Program p;
    p.inputs = base.inputs;
    for (auto& f : fused) {
      if (f.regions.size() == 1 && g.chance(0.4)) {
        p.main.emplace_back(f.regions.front());
      } else {
        p.main.emplace_back(Call{f.id});
        p.functions.push_back(std::move(f));
      }
    }
    if (validate(p).empty()) return p;
  }
  throw std::runtime_error("random_raw_program: no valid program for seed " + std::to_string(seed));
}

Program random_region_program(std::uint64_t seed, std::uint32_t max_body) {
  RandomProgramOptions o;
  o.max_functions = 1;
  o.max_body = max_body;
  o.max_ops = 14;
  o.max_span = 6;
  o.max_carried = 3;
  o.multi_cycle = 0.5;
  return random_program(seed, o);
}

}  // namespace oracle

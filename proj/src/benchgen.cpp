#include "dftsim/benchgen.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dftsim/error.hpp"
#include "rng.hpp"

namespace dftsim {

namespace {

using json = nlohmann::ordered_json;
using detail::bernoulli;
using detail::uniform_below;
using detail::uniform_between;

void check(const BenchmarkShape& s) {
  auto fail = [&](const std::string& why) { throw ConfigError("shape '" + s.name + "': " + why); };
  if (s.name.empty()) fail("empty name");
  if (s.states == 0) fail("states must be positive");
  if (s.body_min == 0 || s.body_min > s.body_max) fail("bad body length range");
  if (s.kind == RegionKind::Loop && (s.iter_min == 0 || s.iter_min > s.iter_max))
    fail("bad iteration range");
  if (s.regs_min == 0 || s.regs_min > s.regs_max) fail("bad register range");
  if (s.widths.empty()) fail("no register widths");
  for (auto w : s.widths)
    if (w == 0 || w > 32) fail("register width outside 1..32");
  if (!(s.multi_cycle_fraction >= 0.0 && s.multi_cycle_fraction <= 1.0))
    fail("multi_cycle_fraction outside [0, 1]");
  if (s.multi_cycle_fraction > 0 && s.max_span == 0) fail("multi-cycle ops need max_span >= 1");
  if (s.ops_per_cycle == 0) fail("ops_per_cycle must be positive");
  // One extra slot for the accumulator of loop states.
  const std::uint64_t need = s.regs_max + (s.kind == RegionKind::Loop && s.iter_max > 1 ? 1 : 0);
  if (need > std::uint64_t{s.ops_per_cycle} * s.body_min)
    fail("more operations than schedulable issue slots");
}

std::string pad(std::uint32_t k, std::uint32_t n) {
  std::string d = std::to_string(k);
  const auto digits = std::max<std::size_t>(2, std::to_string(n - 1).size());
  return std::string(digits - std::min(digits, d.size()), '0') + d;
}

std::uint32_t draw_span(std::mt19937_64& eng, const BenchmarkShape& s, std::uint32_t room) {
  if (room == 0 || s.max_span == 0 || !bernoulli(eng, s.multi_cycle_fraction)) return 0;
  return static_cast<std::uint32_t>(uniform_between(eng, 1, std::min(s.max_span, room)));
}

struct Draft {
  std::uint32_t start, end, width;
};

}  // namespace

Program generate(const BenchmarkShape& s) {
  check(s);
  std::mt19937_64 eng(s.seed);
  Program p;
  RegisterId link;

  for (std::uint32_t k = 0; k < s.states; ++k) {
    const FunctionId fid = s.name + "_" + pad(k, s.states);
    Region r;
    r.kind = s.kind;
    r.body_length = static_cast<std::uint32_t>(uniform_between(eng, s.body_min, s.body_max));
    r.iterations = s.kind == RegionKind::Loop
                       ? static_cast<std::uint32_t>(uniform_between(eng, s.iter_min, s.iter_max))
                       : 1;
    const auto L = r.body_length;

    const RegisterId in = "in_" + fid;
    p.inputs[in] = static_cast<std::uint32_t>(eng());
    if (!link.empty()) r.live_in.push_back(link);
    r.live_in.push_back(in);
    RegisterId acc;
    if (r.iterations > 1) {
      acc = "acc_" + fid;
      p.inputs[acc] = static_cast<std::uint32_t>(eng());
      r.live_in.push_back(acc);
    }

    std::vector<std::uint32_t> used(L, 0);
    Draft acc_draft{};
    if (!acc.empty()) {
      const auto span = draw_span(eng, s, L - 1);
      acc_draft = {L - 1 - span, L - 1, s.widths[uniform_below(eng, s.widths.size())]};
      ++used[acc_draft.start];
    }

    const auto m = static_cast<std::uint32_t>(uniform_between(eng, s.regs_min, s.regs_max));
    std::vector<Draft> drafts;
    for (std::uint32_t j = 0; j < m; ++j) {
      std::vector<std::uint32_t> open;
      for (std::uint32_t c = 0; c < L; ++c)
        if (used[c] < s.ops_per_cycle) open.push_back(c);
      const auto start = open[uniform_below(eng, open.size())];
      ++used[start];
      const auto span = draw_span(eng, s, L - 1 - start);
      drafts.push_back({start, start + span, s.widths[uniform_below(eng, s.widths.size())]});
    }
    std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
      return a.start != b.start ? a.start < b.start : a.end < b.end;
    });

    std::vector<std::pair<std::uint32_t, RegisterId>> produced;  // (end, register)
    std::set<RegisterId> read;
    auto pick = [&](std::uint32_t start) -> RegisterId {
      std::vector<RegisterId> ready;
      for (const auto& [end, reg] : produced)
        if (end < start) ready.push_back(reg);
      // Mostly recent values, so chains stay live across several cycles.
      if (!ready.empty() && bernoulli(eng, 0.6)) {
        const auto window = std::min<std::size_t>(3, ready.size());
        return ready[ready.size() - 1 - uniform_below(eng, window)];
      }
      std::vector<RegisterId> all = r.live_in;
      all.insert(all.end(), ready.begin(), ready.end());
      return all[uniform_below(eng, all.size())];
    };

    for (std::uint32_t j = 0; j < drafts.size(); ++j) {
      const auto& d = drafts[j];
      Operation op;
      op.id = fid + "_o" + std::to_string(j);
      op.output = fid + "_r" + std::to_string(j);
      op.start = d.start;
      op.end = d.end;
      op.width = d.width;
      const auto roll = uniform_below(eng, 100);
      if (roll < 5) {
        op.opcode = Opcode::Const;
        op.imm = static_cast<std::uint32_t>(eng());
      } else if (roll < 15) {
        op.opcode = Opcode::Pass;
      } else {
        static constexpr Opcode kBinary[] = {Opcode::Add, Opcode::Sub, Opcode::Mul, Opcode::Xor};
        op.opcode = kBinary[uniform_below(eng, 4)];
      }
      for (std::size_t a = 0; a < arity(op.opcode); ++a) op.inputs.push_back(pick(d.start));
      read.insert(op.inputs.begin(), op.inputs.end());
      produced.emplace_back(d.end, op.output);
      r.ops.push_back(std::move(op));
    }

    if (!acc.empty()) {
      Operation op;
      op.id = fid + "_acc";
      op.output = acc;
      op.opcode = Opcode::Add;
      op.start = acc_draft.start;
      op.end = acc_draft.end;
      op.width = acc_draft.width;
      RegisterId x = in;
      for (const auto& [end, reg] : produced)
        if (end < op.start) x = reg;
      op.inputs = {acc, x};
      read.insert(x);
      r.ops.push_back(std::move(op));
    }

    Function f;
    f.id = fid;
    RegisterId last_sink;
    std::uint32_t last_end = 0;
    for (const auto& [end, reg] : produced)
      if (!read.count(reg)) {
        f.result_regs.push_back(reg);
        if (last_sink.empty() || end >= last_end) {
          last_sink = reg;
          last_end = end;
        }
      }
    if (!acc.empty()) f.result_regs.push_back(acc);
    link = acc.empty() ? last_sink : acc;
    if (link.empty()) link = produced.back().second;
    if (std::find(f.result_regs.begin(), f.result_regs.end(), link) == f.result_regs.end())
      f.result_regs.push_back(link);
    f.regions.push_back(std::move(r));

    if (k > 0) p.dependencies.push_back({p.functions.back().id, fid});
    p.functions.push_back(std::move(f));
  }
  return p;
}

// ---- shape files ------------------------------------------------------------

namespace {

std::pair<std::uint32_t, std::uint32_t> range(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("'") + key + "' must be [min, max]");
  return {v[0].get<std::uint32_t>(), v[1].get<std::uint32_t>()};
}

}  // namespace

BenchmarkShape parse_shape(std::string_view text) {
  BenchmarkShape s;
  try {
    const auto j = json::parse(text);
    static const std::set<std::string> known{"name",   "states",     "kind",
                                             "body",   "iterations", "registers",
                                             "widths", "multi_cycle_fraction",
                                             "max_span", "ops_per_cycle", "seed"};
    for (const auto& [k, v] : j.items())
      if (!known.count(k)) throw ConfigError("unknown shape key '" + k + "'");
    s.name = j.at("name").get<std::string>();
    s.states = j.at("states").get<std::uint32_t>();
    const auto kind = j.value("kind", std::string("loop"));
    if (kind == "loop")
      s.kind = RegionKind::Loop;
    else if (kind == "straight")
      s.kind = RegionKind::Straight;
    else
      throw ConfigError("kind must be loop or straight");
    std::tie(s.body_min, s.body_max) = range(j, "body");
    if (j.contains("iterations")) std::tie(s.iter_min, s.iter_max) = range(j, "iterations");
    std::tie(s.regs_min, s.regs_max) = range(j, "registers");
    s.widths = j.at("widths").get<std::vector<std::uint32_t>>();
    s.multi_cycle_fraction = j.value("multi_cycle_fraction", 0.0);
    s.max_span = j.value("max_span", 1u);
    s.ops_per_cycle = j.value("ops_per_cycle", 4u);
    s.seed = j.value("seed", std::uint64_t{1});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed shape: ") + e.what());
  }
  check(s);
  return s;
}

BenchmarkShape load_shape(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open shape file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_shape(ss.str());
}

std::string shape_to_json(const BenchmarkShape& s) {
  json j;
  j["name"] = s.name;
  j["states"] = s.states;
  j["kind"] = s.kind == RegionKind::Loop ? "loop" : "straight";
  j["body"] = {s.body_min, s.body_max};
  j["iterations"] = {s.iter_min, s.iter_max};
  j["registers"] = {s.regs_min, s.regs_max};
  j["widths"] = s.widths;
  j["multi_cycle_fraction"] = s.multi_cycle_fraction;
  j["max_span"] = s.max_span;
  j["ops_per_cycle"] = s.ops_per_cycle;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

// ---- presets ------------------------------------------------------------------
//
// State counts follow the published benchmark table; lengths and register
// counts are assumptions sized so the whole suite runs at desk scale.

namespace {

BenchmarkShape make(std::string name, std::uint32_t states, RegionKind kind,
                    std::pair<std::uint32_t, std::uint32_t> body,
                    std::pair<std::uint32_t, std::uint32_t> iters,
                    std::pair<std::uint32_t, std::uint32_t> regs, std::vector<std::uint32_t> widths,
                    double mcf, std::uint32_t span, std::uint64_t seed) {
  BenchmarkShape s;
  s.name = std::move(name);
  s.states = states;
  s.kind = kind;
  std::tie(s.body_min, s.body_max) = body;
  std::tie(s.iter_min, s.iter_max) = iters;
  std::tie(s.regs_min, s.regs_max) = regs;
  s.widths = std::move(widths);
  s.multi_cycle_fraction = mcf;
  s.max_span = span;
  s.seed = seed;
  return s;
}

const std::vector<BenchmarkShape>& presets() {
  static const std::vector<BenchmarkShape> all{
      make("adpcm", 24, RegionKind::Loop, {4, 10}, {20, 60}, {5, 9}, {4, 8}, 0.15, 4, 101),
      make("aes", 8, RegionKind::Loop, {8, 16}, {10, 40}, {6, 12}, {8}, 0.15, 4, 102),
      make("gsm", 13, RegionKind::Loop, {16, 32}, {40, 80}, {8, 14}, {16}, 0.2, 8, 103),
      make("float", 1, RegionKind::Loop, {12, 20}, {30, 60}, {8, 14}, {32}, 0.2, 4, 104),
      make("global", 3, RegionKind::Straight, {4, 10}, {1, 1}, {2, 4}, {1, 2}, 0.0, 1, 105),
      make("struct", 2, RegionKind::Loop, {60, 120}, {40, 80}, {2, 3}, {4}, 0.0, 1, 106),
  };
  return all;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : presets()) v.push_back(s.name);
    return v;
  }();
  return names;
}

BenchmarkShape preset(std::string_view name) {
  for (const auto& s : presets())
    if (s.name == name) return s;
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace dftsim

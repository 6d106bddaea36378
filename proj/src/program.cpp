#include "dftsim/program.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dftsim/error.hpp"

namespace dftsim {

using nlohmann::json;

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

const std::pair<Opcode, std::string_view> kOpcodeNames[] = {
    {Opcode::Const, "const"}, {Opcode::Pass, "pass"}, {Opcode::Add, "add"},
    {Opcode::Sub, "sub"},     {Opcode::Mul, "mul"},   {Opcode::Xor, "xor"},
};

// ---- parsing helpers -------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where, std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string() || v.get<std::string>().empty())
    throw SchemaError(where, "expected a non-empty string");
  return v.get<std::string>();
}

std::uint32_t get_u32(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
      v.get<std::int64_t>() > 0xFFFFFFFFll)
    throw SchemaError(where, "expected a non-negative 32-bit integer");
  return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

std::vector<std::string> get_string_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_string(v[i], where + "/" + std::to_string(i)));
  return out;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw SchemaError(where, "unknown key '" + it.key() + "'");
  }
}

Operation parse_op(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  reject_unknown_keys(j, {"id", "opcode", "inputs", "output", "start", "end", "imm", "width"},
                      where);
  Operation op;
  op.id = get_string(require(j, "id", where), where + "/id");
  auto name = get_string(require(j, "opcode", where), where + "/opcode");
  auto code = opcode_from_string(name);
  if (!code) throw SchemaError(where + "/opcode", "unknown opcode '" + name + "'");
  op.opcode = *code;
  op.inputs = get_string_list(require(j, "inputs", where), where + "/inputs");
  op.output = get_string(require(j, "output", where), where + "/output");
  op.start = get_u32(require(j, "start", where), where + "/start");
  op.end = get_u32(require(j, "end", where), where + "/end");
  if (j.contains("imm")) op.imm = get_u32(j["imm"], where + "/imm");
  if (j.contains("width")) op.width = get_u32(j["width"], where + "/width");
  return op;
}

Region parse_region(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where, "expected an object");
  reject_unknown_keys(j, {"kind", "iterations", "body_length", "live_in", "ops"}, where);
  Region r;
  auto kind = get_string(require(j, "kind", where), where + "/kind");
  if (kind == "loop") {
    r.kind = RegionKind::Loop;
  } else if (kind == "straight") {
    r.kind = RegionKind::Straight;
  } else {
    throw SchemaError(where + "/kind", "expected 'loop' or 'straight'");
  }
  r.iterations = j.contains("iterations") ? get_u32(j["iterations"], where + "/iterations") : 1;
  r.body_length = get_u32(require(j, "body_length", where), where + "/body_length");
  if (j.contains("live_in")) r.live_in = get_string_list(j["live_in"], where + "/live_in");
  const auto& ops = require(j, "ops", where);
  if (!ops.is_array()) throw SchemaError(where + "/ops", "expected an array");
  for (std::size_t i = 0; i < ops.size(); ++i)
    r.ops.push_back(parse_op(ops[i], where + "/ops/" + std::to_string(i)));
  return r;
}

json region_to_json(const Region& r) {
  json ops = json::array();
  for (const auto& op : r.ops) {
    json o = {{"id", op.id},         {"opcode", to_string(op.opcode)},
              {"inputs", op.inputs}, {"output", op.output},
              {"start", op.start},   {"end", op.end}};
    if (op.opcode == Opcode::Const) o["imm"] = op.imm;
    if (op.width != 32) o["width"] = op.width;
    ops.push_back(std::move(o));
  }
  return {{"kind", r.kind == RegionKind::Loop ? "loop" : "straight"},
          {"iterations", r.iterations},
          {"body_length", r.body_length},
          {"live_in", r.live_in},
          {"ops", std::move(ops)}};
}

// Adjacency over function indices, built from dependencies (ids must resolve).
std::vector<std::vector<std::size_t>> successors_of(const Program& p) {
  std::vector<std::vector<std::size_t>> succ(p.functions.size());
  for (const auto& d : p.dependencies) {
    auto a = p.index_of(d.from);
    auto b = p.index_of(d.to);
    if (a != npos && b != npos) succ[a].push_back(b);
  }
  return succ;
}

// reach[i] = set of function indices that are transitive predecessors of i.
std::vector<std::vector<bool>> ancestor_matrix(const Program& p) {
  const auto n = p.functions.size();
  std::vector<std::vector<bool>> anc(n, std::vector<bool>(n, false));
  auto order = topological_order(p);
  auto succ = successors_of(p);
  for (auto u : order) {
    for (auto v : succ[u]) {
      anc[v][u] = true;
      for (std::size_t k = 0; k < n; ++k)
        if (anc[u][k]) anc[v][k] = true;
    }
  }
  return anc;
}

}  // namespace

// ---- opcode semantics ------------------------------------------------------

std::string_view to_string(Opcode op) {
  for (const auto& [code, name] : kOpcodeNames)
    if (code == op) return name;
  return "?";
}

std::optional<Opcode> opcode_from_string(std::string_view s) {
  for (const auto& [code, name] : kOpcodeNames)
    if (name == s) return code;
  return std::nullopt;
}

std::size_t arity(Opcode op) {
  switch (op) {
    case Opcode::Const: return 0;
    case Opcode::Pass: return 1;
    default: return 2;
  }
}

std::uint32_t evaluate(Opcode op, std::span<const std::uint32_t> a, std::uint32_t imm) {
  switch (op) {
    case Opcode::Const: return imm;
    case Opcode::Pass: return a[0];
    case Opcode::Add: return a[0] + a[1];
    case Opcode::Sub: return a[0] - a[1];
    case Opcode::Mul: return a[0] * a[1];
    case Opcode::Xor: return a[0] ^ a[1];
  }
  return 0;
}

// ---- Program queries -------------------------------------------------------

const Function* Program::find(std::string_view id) const {
  auto i = index_of(id);
  return i == npos ? nullptr : &functions[i];
}

std::size_t Program::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < functions.size(); ++i)
    if (functions[i].id == id) return i;
  return npos;
}

std::vector<FunctionId> Program::predecessors(std::string_view id) const {
  std::vector<FunctionId> out;
  for (const auto& d : dependencies)
    if (d.to == id && std::find(out.begin(), out.end(), d.from) == out.end())
      out.push_back(d.from);
  return out;
}

std::vector<FunctionId> Program::entry_set() const {
  std::vector<FunctionId> out;
  for (const auto& f : functions)
    if (predecessors(f.id).empty()) out.push_back(f.id);
  return out;
}

bool Program::is_normalized() const {
  if (!main.empty()) return false;
  return std::all_of(functions.begin(), functions.end(),
                     [](const Function& f) { return f.regions.size() == 1; });
}

std::vector<std::size_t> topological_order(const Program& p) {
  const auto n = p.functions.size();
  auto succ = successors_of(p);
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& s : succ)
    for (auto v : s) ++indeg[v];
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto u = ready.top();
    ready.pop();
    order.push_back(u);
    for (auto v : succ[u])
      if (--indeg[v] == 0) ready.push(v);
  }
  if (order.size() != n) throw ValidationError("cyclic dependency between functions");
  return order;
}

std::vector<RegisterId> written_registers(const Region& region) {
  std::vector<RegisterId> out;
  for (const auto& op : region.ops) out.push_back(op.output);
  return out;
}

std::vector<RegisterId> loop_carried(const Region& region) {
  std::vector<RegisterId> out;
  for (const auto& r : region.live_in) {
    bool written = std::any_of(region.ops.begin(), region.ops.end(),
                               [&](const Operation& op) { return op.output == r; });
    if (written) out.push_back(r);
  }
  return out;
}

std::uint64_t register_flip_flops(const Function& function) {
  std::uint64_t total = 0;
  for (const auto& r : function.regions)
    for (const auto& op : r.ops) total += op.width;
  return total;
}

std::vector<RegisterId> observable_registers(const Program& p) {
  std::set<RegisterId> regs;
  for (const auto& f : p.functions) regs.insert(f.result_regs.begin(), f.result_regs.end());
  for (const auto& item : p.main)
    if (auto* r = std::get_if<Region>(&item))
      for (const auto& op : r->ops) regs.insert(op.output);
  return {regs.begin(), regs.end()};
}

// ---- (de)serialization -----------------------------------------------------

Program parse_program(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("/", "expected an object");
  reject_unknown_keys(doc, {"functions", "dependencies", "main", "inputs", "$schema"}, "/");

  Program p;
  const auto& fns = require(doc, "functions", "/");
  if (!fns.is_array()) throw SchemaError("/functions", "expected an array");
  for (std::size_t i = 0; i < fns.size(); ++i) {
    const std::string where = "/functions/" + std::to_string(i);
    const auto& jf = fns[i];
    if (!jf.is_object()) throw SchemaError(where, "expected an object");
    reject_unknown_keys(jf, {"id", "result_regs", "regions", "loose"}, where);
    Function f;
    f.id = get_string(require(jf, "id", where), where + "/id");
    if (p.find(f.id)) throw SchemaError(where + "/id", "duplicate function id '" + f.id + "'");
    f.result_regs = get_string_list(require(jf, "result_regs", where), where + "/result_regs");
    const auto& regions = require(jf, "regions", where);
    if (!regions.is_array() || regions.empty())
      throw SchemaError(where + "/regions", "expected a non-empty array");
    for (std::size_t k = 0; k < regions.size(); ++k)
      f.regions.push_back(parse_region(regions[k], where + "/regions/" + std::to_string(k)));
    if (jf.contains("loose")) {
      if (!jf["loose"].is_boolean()) throw SchemaError(where + "/loose", "expected a boolean");
      f.loose = jf["loose"].get<bool>();
    }
    p.functions.push_back(std::move(f));
  }

  const auto& deps = require(doc, "dependencies", "/");
  if (!deps.is_array()) throw SchemaError("/dependencies", "expected an array");
  for (std::size_t i = 0; i < deps.size(); ++i) {
    const std::string where = "/dependencies/" + std::to_string(i);
    const auto& d = deps[i];
    Dependency dep;
    if (d.is_array() && d.size() == 2) {
      dep = {get_string(d[0], where + "/0"), get_string(d[1], where + "/1")};
    } else if (d.is_object()) {
      dep = {get_string(require(d, "from", where), where + "/from"),
             get_string(require(d, "to", where), where + "/to")};
    } else {
      throw SchemaError(where, "expected [from, to] or {\"from\", \"to\"}");
    }
    if (!p.find(dep.from)) throw SchemaError(where, "dangling reference to '" + dep.from + "'");
    if (!p.find(dep.to)) throw SchemaError(where, "dangling reference to '" + dep.to + "'");
    p.dependencies.push_back(std::move(dep));
  }
  try {
    topological_order(p);
  } catch (const ValidationError&) {
    throw SchemaError("/dependencies", "cyclic dependency");
  }

  if (doc.contains("main")) {
    const auto& m = doc["main"];
    if (!m.is_array()) throw SchemaError("/main", "expected an array");
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string where = "/main/" + std::to_string(i);
      if (m[i].is_object() && m[i].contains("call")) {
        auto id = get_string(m[i]["call"], where + "/call");
        if (!p.find(id)) throw SchemaError(where, "dangling reference to '" + id + "'");
        p.main.emplace_back(Call{id});
      } else if (m[i].is_object() && m[i].contains("loose")) {
        p.main.emplace_back(parse_region(m[i]["loose"], where + "/loose"));
      } else {
        throw SchemaError(where, "expected {\"call\": id} or {\"loose\": region}");
      }
    }
  }
  if (doc.contains("inputs")) {
    const auto& in = doc["inputs"];
    if (!in.is_object()) throw SchemaError("/inputs", "expected an object");
    for (auto it = in.begin(); it != in.end(); ++it)
      p.inputs[it.key()] = get_u32(it.value(), "/inputs/" + it.key());
  }
  return p;
}

Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open program file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::string to_json(const Program& p) {
  json fns = json::array();
  for (const auto& f : p.functions) {
    json regions = json::array();
    for (const auto& r : f.regions) regions.push_back(region_to_json(r));
    json jf = {{"id", f.id}, {"result_regs", f.result_regs}, {"regions", std::move(regions)}};
    if (f.loose) jf["loose"] = true;
    fns.push_back(std::move(jf));
  }
  json deps = json::array();
  for (const auto& d : p.dependencies) deps.push_back({d.from, d.to});
  json doc = {{"functions", std::move(fns)}, {"dependencies", std::move(deps)}};
  if (!p.main.empty()) {
    json m = json::array();
    for (const auto& item : p.main) {
      if (auto* c = std::get_if<Call>(&item)) {
        m.push_back({{"call", c->function}});
      } else {
        m.push_back({{"loose", region_to_json(std::get<Region>(item))}});
      }
    }
    doc["main"] = std::move(m);
  }
  if (!p.inputs.empty()) doc["inputs"] = p.inputs;
  return doc.dump(2) + "\n";
}

// ---- validation ------------------------------------------------------------

std::vector<Violation> validate(const Program& p) {
  std::vector<Violation> out;
  auto report = [&](std::string kind, std::string entity, std::string msg) {
    out.push_back({std::move(kind), std::move(entity), std::move(msg)});
  };

  // Function ids and dependency shape.
  std::set<FunctionId> fids;
  for (const auto& f : p.functions)
    if (!fids.insert(f.id).second) report("duplicate function", f.id, "function id reused");
  bool deps_ok = true;
  for (const auto& d : p.dependencies) {
    for (const auto* id : {&d.from, &d.to}) {
      if (!fids.count(*id)) {
        report("dangling dependency", *id, "dependency names unknown function '" + *id + "'");
        deps_ok = false;
      }
    }
  }
  std::vector<std::vector<bool>> anc;
  if (deps_ok) {
    try {
      anc = ancestor_matrix(p);
    } catch (const ValidationError&) {
      report("cyclic dependency", "dependencies", "dependency relation is not a DAG");
      deps_ok = false;
    }
  }

  // Main sequence position of every function / loose block (raw programs).
  // Writer "owner" keys: function index, or functions.size() + main position for loose blocks.
  const std::size_t nf = p.functions.size();
  std::vector<std::size_t> main_pos(nf, npos);
  for (std::size_t i = 0; i < p.main.size(); ++i) {
    if (auto* c = std::get_if<Call>(&p.main[i])) {
      auto fi = p.index_of(c->function);
      if (fi == npos) {
        report("main sequence", c->function, "call to unknown function");
      } else if (main_pos[fi] != npos) {
        report("main sequence", c->function, "function called more than once");
      } else {
        main_pos[fi] = i;
      }
    }
  }
  if (!p.main.empty())
    for (std::size_t fi = 0; fi < nf; ++fi)
      if (main_pos[fi] == npos)
        report("main sequence", p.functions[fi].id, "function never called from main");

  struct WriterInfo {
    std::size_t owner;   // see above
    std::size_t region;  // region index inside the owner
    const Operation* op;
  };
  std::unordered_map<RegisterId, WriterInfo> writer;
  std::unordered_set<OperationId> op_ids;

  auto scan_region = [&](const Region& r, std::size_t owner, std::size_t ri, const std::string& who) {
    if (r.body_length == 0) report("bad region", who, "body_length must be positive");
    if (r.iterations == 0) report("bad region", who, "iterations must be positive");
    if (r.kind == RegionKind::Straight && r.iterations != 1)
      report("bad region", who, "straight region must have iterations = 1");
    for (const auto& op : r.ops) {
      if (!op_ids.insert(op.id).second) report("duplicate op", op.id, "operation id reused");
      if (op.end < op.start || op.end >= r.body_length)
        report("schedule overflow", op.id,
               "cycles [" + std::to_string(op.start) + "," + std::to_string(op.end) +
                   "] outside body of length " + std::to_string(r.body_length));
      if (op.inputs.size() != arity(op.opcode))
        report("arity", op.id,
               std::string(to_string(op.opcode)) + " takes " + std::to_string(arity(op.opcode)) +
                   " inputs");
      if (op.width == 0 || op.width > 32) report("bad width", op.id, "width must be in 1..32");
      auto [it, fresh] = writer.emplace(op.output, WriterInfo{owner, ri, &op});
      if (!fresh) report("multiple writers", op.output, "register written by more than one op");
    }
  };
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& f = p.functions[fi];
    if (f.regions.empty()) report("empty function", f.id, "function has no region");
    for (std::size_t ri = 0; ri < f.regions.size(); ++ri) scan_region(f.regions[ri], fi, ri, f.id);
  }
  for (std::size_t i = 0; i < p.main.size(); ++i)
    if (auto* r = std::get_if<Region>(&p.main[i])) scan_region(*r, nf + i, 0, "main[" + std::to_string(i) + "]");

  // Ordering between owners: does `src` complete before `dst` starts?
  auto precedes = [&](std::size_t src, std::size_t dst) {
    auto pos = [&](std::size_t o) { return o < nf ? main_pos[o] : o - nf; };
    if (!p.main.empty()) {
      auto a = pos(src), b = pos(dst);
      if (a != npos && b != npos && a < b) return true;
    }
    if (src < nf && dst < nf && deps_ok) return static_cast<bool>(anc[dst][src]);
    return false;
  };

  auto check_region = [&](const Region& r, std::size_t owner, std::size_t ri, const std::string& who) {
    std::unordered_map<RegisterId, const Operation*> local;
    for (const auto& op : r.ops) local.emplace(op.output, &op);
    std::set<RegisterId> live(r.live_in.begin(), r.live_in.end());
    for (const auto& op : r.ops) {
      for (const auto& in : op.inputs) {
        auto it = local.find(in);
        bool ready = it != local.end() && it->second->end < op.start;
        if (!ready && !live.count(in))
          report("use-before-def", op.id,
                 "input '" + in + "' is not written before cycle " + std::to_string(op.start) +
                     " and is not a declared live-in");
      }
    }
    for (const auto& reg : r.live_in) {
      auto lit = local.find(reg);
      if (lit != local.end()) {
        if (lit->second->end + 1 != r.body_length)
          report("loop-carried write not at body end", reg,
                 "loop-carried register must be written by an op ending at cycle " +
                     std::to_string(r.body_length - 1));
        continue;
      }
      auto wit = writer.find(reg);
      if (wit == writer.end()) continue;  // program input
      const auto& w = wit->second;
      if (w.owner == owner) {
        if (w.region > ri)
          report("dangling live-in", reg, who + " reads '" + reg + "' produced by a later region");
        continue;
      }
      if (!precedes(w.owner, owner)) {
        report("dangling live-in", reg,
               who + " reads '" + reg + "' from a function that is not ordered before it");
        continue;
      }
      if (w.owner < nf) {
        const auto& src = p.functions[w.owner];
        if (std::find(src.result_regs.begin(), src.result_regs.end(), reg) == src.result_regs.end())
          report("unexported register", reg,
                 who + " reads '" + reg + "' which is not a result of " + src.id);
      }
    }
  };
  for (std::size_t fi = 0; fi < nf; ++fi) {
    const auto& f = p.functions[fi];
    for (std::size_t ri = 0; ri < f.regions.size(); ++ri) check_region(f.regions[ri], fi, ri, f.id);
    for (const auto& res : f.result_regs) {
      auto it = writer.find(res);
      if (it == writer.end() || it->second.owner != fi)
        report("unknown result register", res, f.id + " does not write result '" + res + "'");
    }
  }
  for (std::size_t i = 0; i < p.main.size(); ++i)
    if (auto* r = std::get_if<Region>(&p.main[i]))
      check_region(*r, nf + i, 0, "main[" + std::to_string(i) + "]");
  return out;
}

// ---- reference execution ---------------------------------------------------

namespace {

// Registers absent from `regs` are unbound; reading one is an error.
void run_region(const Region& r, std::map<RegisterId, std::uint32_t>& regs) {
  std::vector<std::vector<std::uint32_t>> latch(r.ops.size());
  for (std::uint32_t it = 0; it < r.iterations; ++it) {
    for (std::uint32_t c = 0; c < r.body_length; ++c) {
      for (std::size_t i = 0; i < r.ops.size(); ++i) {
        const auto& op = r.ops[i];
        if (op.start != c) continue;
        latch[i].clear();
        for (const auto& in : op.inputs) {
          auto v = regs.find(in);
          if (v == regs.end()) throw ValidationError("unbound live-in register '" + in + "'");
          latch[i].push_back(v->second);
        }
      }
      for (std::size_t i = 0; i < r.ops.size(); ++i) {
        const auto& op = r.ops[i];
        if (op.end == c) regs[op.output] = evaluate(op.opcode, latch[i], op.imm);
      }
    }
  }
}

}  // namespace

FinalState execute_reference(const Program& p, const RegisterValues& inputs) {
  auto violations = validate(p);
  if (!violations.empty())
    throw ValidationError("invalid program: " + violations.front().kind + " (" +
                          violations.front().entity + "): " + violations.front().message);
  std::map<RegisterId, std::uint32_t> regs(inputs.begin(), inputs.end());
  auto run_function = [&](const Function& f) {
    for (const auto& r : f.regions) run_region(r, regs);
  };
  if (!p.main.empty()) {
    for (const auto& item : p.main) {
      if (auto* c = std::get_if<Call>(&item)) {
        run_function(*p.find(c->function));
      } else {
        run_region(std::get<Region>(item), regs);
      }
    }
  } else {
    for (auto fi : topological_order(p)) run_function(p.functions[fi]);
  }
  FinalState out;
  for (const auto& reg : observable_registers(p)) out[reg] = regs.at(reg);
  return out;
}

FinalState execute_reference(const Program& p) { return execute_reference(p, p.inputs); }

}  // namespace dftsim

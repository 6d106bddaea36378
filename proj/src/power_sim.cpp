#include "dftsim/power_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "dftsim/error.hpp"
#include "dftsim/tracker.hpp"
#include "rng.hpp"

namespace dftsim {

// ---- traces and seeds -------------------------------------------------------

using detail::uniform_below;

PowerTrace gen_trace(std::uint64_t total, std::uint32_t k, std::uint64_t seed) {
  if (k >= total && k > 0)
    throw ConfigError("cannot place " + std::to_string(k) + " outages in " + std::to_string(total) +
                      " progress cycles");
  PowerTrace t;
  t.seed = seed;
  t.total_cycles = total;
  if (k == 0) return t;
  std::mt19937_64 eng(seed);
  // Floyd's sampling without replacement.
  std::set<std::uint64_t> picked;
  for (std::uint64_t j = total - k; j < total; ++j) {
    const auto v = uniform_below(eng, j + 1);
    if (!picked.insert(v).second) picked.insert(j);
  }
  t.points.assign(picked.begin(), picked.end());
  return t;
}

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::DFT: return "dft";
    case PolicyKind::CP: return "cp";
    case PolicyKind::FullChip: return "fullchip";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view s) {
  std::string low(s);
  for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "dft") return PolicyKind::DFT;
  if (low == "cp") return PolicyKind::CP;
  if (low == "fullchip") return PolicyKind::FullChip;
  throw ConfigError("unknown policy '" + std::string(s) + "' (expected dft, cp or fullchip)");
}

std::uint64_t cell_seed(std::uint64_t base, std::string_view benchmark, PolicyKind policy,
                        std::uint32_t k, std::uint32_t round) {
  const std::string key = std::string(benchmark) + "|" + std::string(to_string(policy)) + "|" +
                          std::to_string(k) + "|" + std::to_string(round);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return base ^ h;
}

// ---- machine ----------------------------------------------------------------

namespace {

struct LostState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct COp {
  Opcode opcode;
  std::uint32_t imm;
  std::vector<std::uint32_t> in;
  std::uint32_t out;
  std::uint32_t start, end;
};

struct CFunc {
  std::uint32_t body = 1;
  std::uint32_t iterations = 1;
  std::vector<COp> ops;
  std::vector<std::vector<std::uint32_t>> issue, commit;  // op indices per body cycle
  std::vector<std::uint32_t> written, results, carried;
  std::uint64_t result_ffs = 0;
  std::uint64_t result_words = 0;
};

enum class VState : std::uint8_t { Empty, Valid, Lost };

class Machine {
 public:
  Machine(const Analysis& a, PolicyKind policy, const CostModel& cost)
      : a_(a), policy_(policy), cost_(cost), trackers_(a.program, a.specs) {
    compile();
  }

  SimulationReport run(const PowerTrace& trace);

 private:
  std::uint32_t reg(const RegisterId& id) {
    auto [it, fresh] = index_.try_emplace(id, static_cast<std::uint32_t>(names_.size()));
    if (fresh) names_.push_back(id);
    return it->second;
  }

  void compile();
  std::uint32_t read(std::uint32_t r) const;
  void start_function(std::size_t i);
  void execute(std::size_t i);
  void retire(std::size_t i);
  void outage(SimulationReport& rep);
  void outage_tracked(SimulationReport& rep);
  void outage_cp(SimulationReport& rep);

  const Analysis& a_;
  PolicyKind policy_;
  CostModel cost_;
  TrackerArray trackers_;

  std::unordered_map<RegisterId, std::uint32_t> index_;
  std::vector<RegisterId> names_;
  std::vector<std::uint32_t> width_;
  std::vector<CFunc> funcs_;

  std::vector<std::uint32_t> value_;
  std::vector<VState> state_;
  std::vector<std::uint32_t> nv_;
  std::vector<bool> nv_valid_;

  std::vector<std::vector<std::vector<std::uint32_t>>> latch_;  // function, op
  std::vector<bool> retired_;
  std::vector<std::uint64_t> stall_;
  std::vector<bool> skip_tick_;
  std::uint64_t replay_ = 0;
  SimulationReport* rep_ = nullptr;
};

void Machine::compile() {
  for (const auto& f : a_.program.functions) {
    const auto& r = f.region();
    CFunc cf;
    cf.body = r.body_length;
    cf.iterations = r.iterations;
    cf.issue.resize(r.body_length);
    cf.commit.resize(r.body_length);
    for (const auto& op : r.ops) {
      COp c{op.opcode, op.imm, {}, reg(op.output), op.start, op.end};
      for (const auto& in : op.inputs) c.in.push_back(reg(in));
      const auto idx = static_cast<std::uint32_t>(cf.ops.size());
      cf.issue[op.start].push_back(idx);
      cf.commit[op.end].push_back(idx);
      cf.ops.push_back(std::move(c));
      if (width_.size() < names_.size()) width_.resize(names_.size(), 32);
      width_[cf.ops.back().out] = op.width;
    }
    for (const auto& w : written_registers(r)) cf.written.push_back(reg(w));
    for (const auto& res : f.result_regs) {
      cf.results.push_back(reg(res));
    }
    for (const auto& c : loop_carried(r)) cf.carried.push_back(reg(c));
    funcs_.push_back(std::move(cf));
  }
  for (const auto& [id, v] : a_.program.inputs) reg(id);
  for (const auto& id : observable_registers(a_.raw)) reg(id);
  width_.resize(names_.size(), 32);
  for (auto& cf : funcs_)
    for (auto r : cf.results) {
      cf.result_ffs += width_[r];
      cf.result_words += (width_[r] + 31) / 32;
    }

  value_.assign(names_.size(), 0);
  state_.assign(names_.size(), VState::Empty);
  nv_.assign(names_.size(), 0);
  nv_valid_.assign(names_.size(), false);
  for (const auto& [id, v] : a_.program.inputs) {
    nv_[index_.at(id)] = v;
    nv_valid_[index_.at(id)] = true;
  }
  latch_.resize(funcs_.size());
  for (std::size_t i = 0; i < funcs_.size(); ++i) latch_[i].resize(funcs_[i].ops.size());
  retired_.assign(funcs_.size(), false);
  stall_.assign(funcs_.size(), 0);
  skip_tick_.assign(funcs_.size(), false);
}

std::uint32_t Machine::read(std::uint32_t r) const {
  switch (state_[r]) {
    case VState::Valid: return value_[r];
    case VState::Lost: throw LostState("read of register '" + names_[r] + "' lost at power failure");
    case VState::Empty: break;
  }
  if (nv_valid_[r]) return nv_[r];
  throw LostState("read of unbound register '" + names_[r] + "'");
}

void Machine::start_function(std::size_t i) {
  // Loop-carried registers are loaded from their initial values.
  for (auto r : funcs_[i].carried) {
    if (!nv_valid_[r]) throw LostState("no initial value for loop-carried '" + names_[r] + "'");
    value_[r] = nv_[r];
    state_[r] = VState::Valid;
  }
}

void Machine::execute(std::size_t i) {
  const auto& cf = funcs_[i];
  const auto& t = trackers_[i];
  const auto c = t.count;
  for (auto oi : cf.issue[c]) {
    auto& l = latch_[i][oi];
    l.clear();
    for (auto r : cf.ops[oi].in) l.push_back(read(r));
  }
  for (auto oi : cf.commit[c]) {
    const auto& op = cf.ops[oi];
    value_[op.out] = evaluate(op.opcode, latch_[i][oi], op.imm);
    state_[op.out] = VState::Valid;
  }
  if (c + 1 == cf.body && t.iter + 1 == cf.iterations) retire(i);
}

void Machine::retire(std::size_t i) {
  const auto& cf = funcs_[i];
  for (auto r : cf.results) {
    nv_[r] = read(r);
    nv_valid_[r] = true;
  }
  for (auto r : cf.written) state_[r] = VState::Empty;
  retired_[i] = true;
  if (policy_ == PolicyKind::CP) {
    rep_->ff_stores += cf.result_ffs;
    rep_->store_cost += cf.result_words * cost_.word_store_cycles;
  }
}

void Machine::outage(SimulationReport& rep) {
  if (policy_ == PolicyKind::CP)
    outage_cp(rep);
  else
    outage_tracked(rep);
}

void Machine::outage_tracked(SimulationReport& rep) {
  std::vector<std::uint32_t> before(funcs_.size());
  for (std::size_t i = 0; i < funcs_.size(); ++i) before[i] = trackers_[i].count;
  const auto statuses = trackers_.snapshot();

  std::uint64_t slices = 0;
  if (policy_ == PolicyKind::DFT) {
    const auto stored = lookup(a_.table, statuses);
    slices = stored.size();
    for (std::uint32_t r = 0; r < names_.size(); ++r) {
      if (state_[r] != VState::Valid) continue;
      auto it = a_.placement.registers.find(names_[r]);
      const bool kept = it != a_.placement.registers.end() &&
                        std::all_of(it->second.begin(), it->second.end(), [&](SliceAddress s) {
                          return std::binary_search(stored.begin(), stored.end(), s);
                        });
      if (!kept) state_[r] = VState::Lost;
    }
  } else {
    slices = a_.placement.grid.slices();
  }
  const std::uint64_t ffs = slices * a_.placement.grid.ffs_per_slice;
  rep.outage_ff_stores.push_back(ffs);
  rep.ff_stores += ffs;
  rep.slice_stores += slices;
  rep.store_cost += slices * cost_.slice_store_cycles;

  try {
    trackers_ = restore(trackers_, statuses, a_.resume_points());
  } catch (const CorruptionError& e) {
    throw LostState(std::string("tracker restore failed: ") + e.what());
  }

  std::vector<std::uint64_t> lost(funcs_.size(), 0);
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < funcs_.size(); ++i) {
    if (trackers_[i].phase != Phase::Running) continue;
    // Pipeline latches are volatile; ops still in flight at r are re-issued.
    for (auto& l : latch_[i]) l.clear();
    const auto r = trackers_[i].count;
    lost[i] = before[i] - r;
    worst = std::max(worst, lost[i]);
    const auto& cf = funcs_[i];
    for (std::size_t oi = 0; oi < cf.ops.size(); ++oi) {
      const auto& op = cf.ops[oi];
      if (op.start <= r && r < op.end)
        for (auto in : op.in) latch_[i][oi].push_back(read(in));
    }
  }
  for (std::size_t i = 0; i < funcs_.size(); ++i)
    if (trackers_[i].phase == Phase::Running) stall_[i] = worst - lost[i];
  replay_ = worst;
  rep.rollbacks.push_back(worst);
  rep.total_rollback += worst;
}

void Machine::outage_cp(SimulationReport& rep) {
  std::vector<std::uint64_t> lost(funcs_.size(), 0);
  std::uint64_t worst = 0;
  for (std::size_t i = 0; i < funcs_.size(); ++i) {
    auto& t = trackers_[i];
    if (t.phase != Phase::Running || retired_[i]) continue;
    const auto& cf = funcs_[i];
    lost[i] = std::uint64_t{t.iter} * cf.body + t.count + 1;
    worst = std::max(worst, lost[i]);
    for (auto r : cf.written) state_[r] = VState::Empty;
    for (auto& l : latch_[i]) l.clear();
    t.count = 0;
    t.iter = 0;
    skip_tick_[i] = true;
    start_function(i);
  }
  for (std::size_t i = 0; i < funcs_.size(); ++i)
    if (trackers_[i].phase == Phase::Running && !retired_[i]) stall_[i] = worst - lost[i];
  replay_ = worst;
  rep.outage_ff_stores.push_back(0);
  rep.rollbacks.push_back(worst);
  rep.total_rollback += worst;
}

SimulationReport Machine::run(const PowerTrace& trace) {
  SimulationReport rep;
  rep.policy = policy_;
  rep_ = &rep;
  switch (policy_) {
    case PolicyKind::DFT: rep.bram = bram_usage(a_.table); break;
    case PolicyKind::CP: rep.bram = static_cast<std::uint32_t>(funcs_.size()); break;
    case PolicyKind::FullChip: rep.bram = 0; break;
  }

  std::size_t next = 0;
  std::uint64_t progress = 0;
  std::vector<bool> stalled(funcs_.size());
  auto start_ready = [&] {
    for (auto i : trackers_.start_ready()) {
      start_function(i);
      stall_[i] = replay_;
    }
  };

  try {
    start_ready();
    while (!trackers_.all_done()) {
      const bool replaying = replay_ > 0;
      for (std::size_t i = 0; i < funcs_.size(); ++i) {
        stalled[i] = false;
        if (trackers_[i].phase != Phase::Running || retired_[i]) continue;
        if (stall_[i] > 0) {
          --stall_[i];
          stalled[i] = true;
          continue;
        }
        execute(i);
      }
      if (!replaying && next < trace.points.size() && trace.points[next] == progress) {
        ++next;
        outage(rep);
      }
      for (std::size_t i = 0; i < funcs_.size(); ++i) {
        if (trackers_[i].phase != Phase::Running || stalled[i]) continue;
        if (skip_tick_[i]) {
          skip_tick_[i] = false;
          continue;
        }
        trackers_[i] = tick(trackers_[i]);
      }
      start_ready();
      ++rep.wall_cycles;
      if (replaying)
        --replay_;
      else
        ++progress;
      if (funcs_.empty()) break;
    }
  } catch (const LostState& e) {
    rep.violations.emplace_back(e.what());
  }
  rep.progress_cycles = progress;

  for (const auto& id : observable_registers(a_.raw)) {
    const auto r = index_.at(id);
    if (nv_valid_[r]) rep.final_state[id] = nv_[r];
  }
  if (rep.violations.empty()) {
    for (const auto& [id, v] : a_.reference) {
      auto it = rep.final_state.find(id);
      if (it == rep.final_state.end())
        rep.violations.push_back("missing result '" + id + "'");
      else if (it->second != v)
        rep.violations.push_back("result '" + id + "' is " + std::to_string(it->second) +
                                 ", expected " + std::to_string(v));
    }
  }
  rep.consistent = rep.violations.empty();
  rep_ = nullptr;
  return rep;
}

}  // namespace

std::uint64_t progress_cycles(const Analysis& analysis) {
  Machine m(analysis, PolicyKind::DFT, {});
  return m.run({}).progress_cycles;
}

SimulationReport run(const Analysis& analysis, PolicyKind policy, const PowerTrace& trace,
                     const CostModel& cost) {
  Machine m(analysis, policy, cost);
  return m.run(trace);
}

// ---- Monte Carlo --------------------------------------------------------------

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double MonteCarloCell::mean_rollback() const { return mean(rollback); }
double MonteCarloCell::stddev_rollback() const { return stddev(rollback); }
double MonteCarloCell::mean_ff_stores() const { return mean(ff_stores); }
double MonteCarloCell::stddev_ff_stores() const { return stddev(ff_stores); }

std::vector<MonteCarloCell> run_monte_carlo(const Analysis& analysis, const MonteCarloConfig& cfg) {
  if (cfg.rounds == 0) throw ConfigError("rounds must be at least 1");
  if (cfg.k_min > cfg.k_max) throw ConfigError("empty outage range");
  const auto total = progress_cycles(analysis);
  if (cfg.k_max > 0 && cfg.k_max >= total)
    throw ConfigError("outage count " + std::to_string(cfg.k_max) + " does not fit " +
                      std::to_string(total) + " progress cycles");

  std::vector<MonteCarloCell> cells;
  for (auto p : cfg.policies)
    for (auto k = cfg.k_min; k <= cfg.k_max; ++k) {
      MonteCarloCell c;
      c.policy = p;
      c.k = k;
      c.seeds.resize(cfg.rounds);
      c.rollback.resize(cfg.rounds);
      c.ff_stores.resize(cfg.rounds);
      c.outages.resize(cfg.rounds);
      cells.push_back(std::move(c));
    }

  const std::size_t jobs = cells.size() * cfg.rounds;
  std::atomic<std::size_t> cursor{0};
  std::vector<std::uint8_t> bad(jobs, 0);
  auto worker = [&] {
    for (;;) {
      const auto j = cursor.fetch_add(1);
      if (j >= jobs) return;
      auto& cell = cells[j / cfg.rounds];
      const auto round = static_cast<std::uint32_t>(j % cfg.rounds);
      const auto seed = cell_seed(cfg.seed, cfg.benchmark, cell.policy, cell.k, round);
      const auto rep = run(analysis, cell.policy, gen_trace(total, cell.k, seed), cfg.cost);
      cell.seeds[round] = seed;
      cell.rollback[round] = static_cast<double>(rep.total_rollback);
      cell.ff_stores[round] = static_cast<double>(rep.ff_stores);
      cell.outages[round] = rep.rollbacks.size();
      bad[j] = rep.consistent ? 0 : 1;
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, jobs));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t j = 0; j < jobs; ++j) cells[j / cfg.rounds].inconsistent += bad[j];
  return cells;
}

}  // namespace dftsim

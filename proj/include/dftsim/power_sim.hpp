#pragma once

// Intermittent-power execution of an analyzed program under three recovery
// policies, with outages injected at progress points.
//
// Machine model, per global cycle: every running function executes its
// current body cycle (issue, then commit) and retires its results to the
// non-volatile store right after its final cycle; then an outage fires if the
// trace names this progress point; then trackers tick; then idle trackers
// whose lock head is satisfied start. After an outage the running functions
// replay from their resume points and the ones with less to replay stall, so
// every outage costs max-over-functions rollback wall cycles and progress
// points keep a 1:1 mapping onto the uninterrupted schedule.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dftsim/analysis.hpp"

namespace dftsim {

struct PowerTrace {
  std::vector<std::uint64_t> points;  // strictly increasing, < total_cycles
  std::uint64_t seed = 0;
  std::uint64_t total_cycles = 0;
};

/// k distinct progress points drawn uniformly without replacement from
/// [0, total_cycles). Throws ConfigError when k >= total_cycles.
PowerTrace gen_trace(std::uint64_t total_cycles, std::uint32_t k, std::uint64_t seed);

enum class PolicyKind { DFT, CP, FullChip };

std::string_view to_string(PolicyKind p);
/// Accepts dft, cp, fullchip (case-insensitive). Throws ConfigError.
PolicyKind policy_from_string(std::string_view s);

/// Store latencies; accounting only, never part of rollback.
struct CostModel {
  std::uint64_t slice_store_cycles = 1;  // DFT / FullChip, per SLICE
  std::uint64_t word_store_cycles = 1;   // CP, per 32-bit word
};

struct SimulationReport {
  PolicyKind policy = PolicyKind::DFT;
  std::uint64_t total_rollback = 0;
  std::vector<std::uint64_t> rollbacks;  // one per fired outage
  std::vector<std::uint64_t> outage_ff_stores;  // flip-flops stored at each outage (DFT / FullChip)
  std::uint64_t ff_stores = 0;
  std::uint64_t slice_stores = 0;
  std::uint32_t bram = 0;
  std::uint64_t progress_cycles = 0;
  std::uint64_t wall_cycles = 0;
  std::uint64_t store_cost = 0;
  FinalState final_state;
  bool consistent = false;
  std::vector<std::string> violations;
};

/// Length of the uninterrupted schedule in global cycles.
std::uint64_t progress_cycles(const Analysis& analysis);

/// Never throws for a lost-state read; such runs come back with
/// consistent == false and the reason in `violations`.
SimulationReport run(const Analysis& analysis, PolicyKind policy, const PowerTrace& trace,
                     const CostModel& cost = {});

/// Per-cell seed: base ^ FNV-1a 64 of "benchmark|policy|k|round".
std::uint64_t cell_seed(std::uint64_t base, std::string_view benchmark, PolicyKind policy,
                        std::uint32_t k, std::uint32_t round);

struct MonteCarloCell {
  PolicyKind policy = PolicyKind::DFT;
  std::uint32_t k = 0;
  std::vector<std::uint64_t> seeds;  // per round
  std::vector<double> rollback;      // total rollback per round
  std::vector<double> ff_stores;     // per round
  std::vector<std::uint64_t> outages;  // outages that fired per round
  std::uint64_t inconsistent = 0;

  double mean_rollback() const;
  double stddev_rollback() const;
  double mean_ff_stores() const;
  double stddev_ff_stores() const;
};

struct MonteCarloConfig {
  std::string benchmark;
  std::vector<PolicyKind> policies{PolicyKind::DFT, PolicyKind::CP};
  std::uint32_t k_min = 1;
  std::uint32_t k_max = 10;
  std::uint32_t rounds = 10;
  std::uint64_t seed = 1;
  CostModel cost;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Cells ordered by policy (as given), then k. Throws ConfigError for rounds == 0.
std::vector<MonteCarloCell> run_monte_carlo(const Analysis& analysis, const MonteCarloConfig& config);

double mean(const std::vector<double>& v);
/// Sample standard deviation; 0 for fewer than two samples.
double stddev(const std::vector<double>& v);

}  // namespace dftsim

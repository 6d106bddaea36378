#include <iostream>

#include <CLI11.hpp>

#include "dftsim/error.hpp"
#include "dftsim/report.hpp"

namespace {

struct Flags {
  std::string program;
  std::vector<std::string> presets;
  std::vector<std::string> policies;
  std::string outages = "1..10";
  std::uint32_t rounds = 10;
  std::uint64_t seed = 1;
  std::string grid = "100x100";
  std::uint32_t ffs_per_slice = 8;
  std::uint64_t slice_cost = 1;
  std::uint64_t word_cost = 1;
  std::string out;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  auto* prog = cmd->add_option("--program", f.program, "scheduled program (JSON)");
  auto* pre = cmd->add_option("--preset", f.presets, "benchmark preset, repeatable; 'all' for every preset");
  prog->excludes(pre);
  cmd->add_option("--policy", f.policies, "dft|cp|fullchip, repeatable");
  cmd->add_option("--outages", f.outages, "outage count K or range A..B");
  cmd->add_option("--rounds", f.rounds, "rounds per cell");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--grid", f.grid, "SLICE grid WxH");
  cmd->add_option("--ffs-per-slice", f.ffs_per_slice, "8 or 16");
  cmd->add_option("--slice-store-cost", f.slice_cost, "cycles per stored SLICE (accounting only)");
  cmd->add_option("--word-store-cost", f.word_cost, "cycles per checkpointed word (accounting only)");
  cmd->add_option("--out", f.out, std::string("output directory (default $") + dftsim::kOutEnv + ")");
  cmd->add_option("--threads", f.threads, "worker threads for compare (0 = all cores)");
}

dftsim::RunConfig to_config(const Flags& f, bool default_all_policies) {
  dftsim::RunConfig c;
  c.program_path = f.program;
  c.presets = f.presets;
  if (!f.policies.empty()) {
    c.policies.clear();
    for (const auto& p : f.policies) c.policies.push_back(dftsim::policy_from_string(p));
  } else if (default_all_policies) {
    c.policies = {dftsim::PolicyKind::DFT, dftsim::PolicyKind::CP, dftsim::PolicyKind::FullChip};
  }
  std::tie(c.k_min, c.k_max) = dftsim::parse_outage_range(f.outages);
  c.rounds = f.rounds;
  c.seed = f.seed;
  std::tie(c.grid.width, c.grid.height) = dftsim::parse_grid(f.grid);
  c.grid.ffs_per_slice = f.ffs_per_slice;
  c.cost.slice_store_cycles = f.slice_cost;
  c.cost.word_store_cycles = f.word_cost;
  c.out_dir = f.out;
  c.threads = f.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataflow-tracked checkpointing simulator for non-volatile FPGAs"};
  app.require_subcommand(1);
  Flags analyze_flags, simulate_flags, compare_flags;
  simulate_flags.outages = "0";
  auto* analyze = app.add_subcommand("analyze", "normalize, map live sets, place, build the control unit");
  auto* simulate = app.add_subcommand("simulate", "one intermittent-power run per policy");
  auto* compare = app.add_subcommand("compare", "Monte Carlo rollback / flip-flop store grids");
  add_common(analyze, analyze_flags);
  add_common(simulate, simulate_flags);
  add_common(compare, compare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dftsim::kExitConfig;
  }

  try {
    if (*analyze) return dftsim::cmd_analyze(to_config(analyze_flags, false), std::cout, std::cerr);
    if (*simulate) return dftsim::cmd_simulate(to_config(simulate_flags, true), std::cout, std::cerr);
    return dftsim::cmd_compare(to_config(compare_flags, false), std::cout, std::cerr);
  } catch (const dftsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dftsim::kExitConfig;
  }
}

#include "dftsim/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <regex>

#include <json.hpp>

#include "dftsim/benchgen.hpp"
#include "dftsim/error.hpp"

namespace dftsim {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// ---- parsing helpers -----------------------------------------------------------

std::pair<std::uint32_t, std::uint32_t> parse_outage_range(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ConfigError("outage range must look like A..B or K: '" + text + "'");
  const auto a = static_cast<std::uint32_t>(std::stoul(m[1]));
  const auto b = m[2].matched ? static_cast<std::uint32_t>(std::stoul(m[2])) : a;
  if (a > b) throw ConfigError("outage range " + text + " is empty");
  return {a, b};
}

std::pair<std::uint32_t, std::uint32_t> parse_grid(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*[xX]\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw ConfigError("grid must look like WxH: '" + text + "'");
  return {static_cast<std::uint32_t>(std::stoul(m[1])), static_cast<std::uint32_t>(std::stoul(m[2]))};
}

std::string resolve_out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "dftsim-out";
}

std::vector<Benchmark> load_benchmarks(const RunConfig& c) {
  if (c.program_path.empty() == c.presets.empty())
    throw ConfigError("give exactly one of --program or --preset");
  std::vector<Benchmark> out;
  if (!c.program_path.empty()) {
    if (!fs::exists(c.program_path)) throw ConfigError("no such program file '" + c.program_path + "'");
    out.push_back({fs::path(c.program_path).stem().string(), load_program(c.program_path)});
    return out;
  }
  std::vector<std::string> names;
  for (const auto& p : c.presets) {
    if (p == "all")
      names.insert(names.end(), preset_names().begin(), preset_names().end());
    else
      names.push_back(p);
  }
  for (const auto& n : names) out.push_back({n, generate(preset(n))});
  return out;
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---- shared plumbing ----------------------------------------------------------

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const CorruptionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInconsistent;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PlacementError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// Lists every violation; returns false when there is any.
bool report_violations(const Benchmark& b, std::ostream& err) {
  const auto v = validate(b.program);
  for (const auto& x : v) err << b.name << ": " << x.kind << " (" << x.entity << "): " << x.message << "\n";
  return v.empty();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << text;
}

fs::path prepare_dir(const RunConfig& c) {
  fs::path dir = resolve_out_dir(c);
  fs::create_directories(dir);
  return dir;
}

const char* mode_name(TrackingMode m) { return m == TrackingMode::Tracked ? "tracked" : "store-all"; }

json analysis_json(const Benchmark& b, const Analysis& a) {
  json j;
  j["benchmark"] = b.name;
  j["states"] = a.program.functions.size();
  json trackers = json::array();
  std::uint64_t ff = 0, lut = 0;
  std::uint32_t widest = kMinTrackerWidth;
  for (const auto& s : a.specs) {
    const auto cost = a.model.tracker(s.width);
    json t;
    t["function"] = s.function;
    t["width"] = s.width;
    t["iterations"] = s.iterations;
    t["count_max"] = s.count_max;
    t["capacity"] = s.capacity();
    t["mode"] = mode_name(s.mode);
    t["control_ff"] = control_flip_flops(s);
    if (s.mode == TrackingMode::Tracked) {
      t["lut"] = cost.lut;
      ff += cost.ff;
      lut += cost.lut;
      widest = std::max(widest, s.width);
    } else {
      ff += control_flip_flops(s);
    }
    trackers.push_back(t);
  }
  j["trackers"] = trackers;

  json live = json::array();
  for (std::size_t i = 0; i < a.live.size(); ++i) {
    std::size_t biggest = 0, entries = 0;
    for (const auto& set : a.live[i].checkpoint) {
      biggest = std::max(biggest, set.size());
      entries += set.size();
    }
    std::uint32_t worst = 0;
    for (std::uint32_t n = 0; n < a.live[i].body_length; ++n) worst = std::max(worst, n - a.live[i].resume[n]);
    live.push_back({{"function", a.program.functions[i].id},
                    {"body_length", a.live[i].body_length},
                    {"largest_set", biggest},
                    {"entries", entries},
                    {"max_rollback", worst}});
  }
  j["live_sets"] = live;

  json cu;
  cu["rows"] = a.table.rows.size();
  cu["pool_entries"] = a.table.pool_entries();
  cu["stored_bits"] = stored_bits(a.table);
  cu["bram"] = bram_usage(a.table);
  cu["tracker_region_slices"] = a.table.tracker_region.size();
  j["control_unit"] = cu;

  const auto cu_width = std::min(widest, kMaxTableWidth);
  const auto cuc = a.model.control_unit(cu_width);
  json res;
  res["tracker_ff"] = ff;
  res["tracker_lut"] = lut;
  res["control_unit_width"] = cu_width;
  res["control_unit_ff"] = cuc.ff;
  res["control_unit_lut"] = cuc.lut;
  res["register_slices"] = a.placement.register_slices;
  res["tracker_slices"] = a.placement.tracker_slices;
  res["chip_ff"] = a.model.chip.ff;
  res["chip_lut"] = a.model.chip.lut;
  res["chip_bram"] = a.model.chip.bram;
  res["chip_slices"] = a.model.chip.slice;
  j["resources"] = res;
  return j;
}

std::string prefix(const std::vector<Benchmark>& all, const Benchmark& b) {
  return all.size() > 1 ? b.name + "." : "";
}

}  // namespace

// ---- commands -------------------------------------------------------------------

int cmd_analyze(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto all = load_benchmarks(c);
    for (const auto& b : all)
      if (!report_violations(b, err)) return kExitValidation;
    const auto dir = prepare_dir(c);
    for (const auto& b : all) {
      const auto a = analyze(b.program, c.grid);
      const auto pre = prefix(all, b);
      write_file(dir / (pre + "normalized.json"), to_json(a.program));
      write_file(dir / (pre + "analysis.json"), analysis_json(b, a).dump(2) + "\n");
      write_file(dir / (pre + "placement.txt"), dump(a.placement));
      const auto bin = serialize(a.table);
      write_file(dir / (pre + "control_unit.bin"), std::string(bin.begin(), bin.end()));
      std::size_t store_all = 0;
      for (const auto& s : a.specs) store_all += s.mode == TrackingMode::StoreAll;
      out << b.name << ": " << a.program.functions.size() << " functions (" << store_all
          << " store-all), control unit " << a.table.rows.size() << " rows, bram " << bram_usage(a.table)
          << "\n";
    }
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (c.k_min != c.k_max) throw ConfigError("simulate takes a single outage count");
    if (c.policies.empty()) throw ConfigError("no policy given");
    const auto all = load_benchmarks(c);
    for (const auto& b : all)
      if (!report_violations(b, err)) return kExitValidation;
    const auto dir = prepare_dir(c);
    int status = kExitOk;
    json doc = json::array();
    for (const auto& b : all) {
      const auto a = analyze(b.program, c.grid);
      const auto total = progress_cycles(a);
      const auto trace = gen_trace(total, c.k_min, c.seed);
      for (auto pol : c.policies) {
        const auto r = run(a, pol, trace, c.cost);
        json j;
        j["benchmark"] = b.name;
        j["policy"] = std::string(to_string(pol));
        j["k"] = c.k_min;
        j["seed"] = c.seed;
        j["trace"] = trace.points;
        j["consistent"] = r.consistent;
        j["violations"] = r.violations;
        j["total_rollback"] = r.total_rollback;
        j["rollbacks"] = r.rollbacks;
        j["max_span"] = a.max_span();
        j["ff_stores"] = r.ff_stores;
        j["outage_ff_stores"] = r.outage_ff_stores;
        j["slice_stores"] = r.slice_stores;
        j["bram"] = r.bram;
        j["progress_cycles"] = r.progress_cycles;
        j["wall_cycles"] = r.wall_cycles;
        j["store_cost"] = r.store_cost;
        j["final_state"] = r.final_state;
        doc.push_back(j);
        out << b.name << " " << to_string(pol) << ": rollback " << r.total_rollback << ", ff stores "
            << r.ff_stores << (r.consistent ? "" : ", INCONSISTENT") << "\n";
        for (const auto& v : r.violations) err << b.name << " " << to_string(pol) << ": " << v << "\n";
        if (!r.consistent) status = kExitInconsistent;
      }
    }
    write_file(dir / "simulate.json", doc.dump(2) + "\n");
    return status;
  });
}

int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (c.policies.empty()) throw ConfigError("no policy given");
    if (c.rounds == 0) throw ConfigError("rounds must be at least 1");
    const auto all = load_benchmarks(c);
    for (const auto& b : all)
      if (!report_violations(b, err)) return kExitValidation;
    const auto dir = prepare_dir(c);

    const std::string head = "benchmark,policy,k,mean,stddev,rounds,seed\n";
    std::string rollback = head, ffstores = head, bram = "benchmark,states,bram_dft,bram_cp\n";
    int status = kExitOk;
    for (const auto& b : all) {
      const auto a = analyze(b.program, c.grid);
      MonteCarloConfig mc;
      mc.benchmark = b.name;
      mc.policies = c.policies;
      mc.k_min = c.k_min;
      mc.k_max = c.k_max;
      mc.rounds = c.rounds;
      mc.seed = c.seed;
      mc.cost = c.cost;
      mc.threads = c.threads;
      const auto cells = run_monte_carlo(a, mc);
      for (const auto& cell : cells) {
        const auto key = csv_field(b.name) + "," + std::string(to_string(cell.policy)) + "," +
                         std::to_string(cell.k) + ",";
        const auto tail = "," + std::to_string(c.rounds) + "," + std::to_string(c.seed) + "\n";
        rollback += key + csv_number(cell.mean_rollback()) + "," + csv_number(cell.stddev_rollback()) + tail;
        ffstores += key + csv_number(cell.mean_ff_stores()) + "," + csv_number(cell.stddev_ff_stores()) + tail;
        if (cell.inconsistent) {
          err << b.name << " " << to_string(cell.policy) << " k=" << cell.k << ": " << cell.inconsistent
              << " inconsistent run(s)\n";
          status = kExitInconsistent;
        }
      }
      bram += csv_field(b.name) + "," + std::to_string(a.program.functions.size()) + "," +
              std::to_string(bram_usage(a.table)) + "," + std::to_string(a.program.functions.size()) + "\n";
      out << b.name << ": " << cells.size() << " cells x " << c.rounds << " rounds\n";
    }
    write_file(dir / "rollback.csv", rollback);
    write_file(dir / "ffstores.csv", ffstores);
    write_file(dir / "bram.csv", bram);
    return status;
  });
}

}  // namespace dftsim

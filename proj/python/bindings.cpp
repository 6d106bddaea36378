#include <algorithm>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dftsim/analysis.hpp"
#include "dftsim/benchgen.hpp"
#include "dftsim/error.hpp"
#include "dftsim/power_sim.hpp"

namespace py = pybind11;
using namespace dftsim;

namespace {

GridConfig grid_of(std::uint32_t width, std::uint32_t height, std::uint32_t ffs) {
  GridConfig g;
  g.width = width;
  g.height = height;
  g.ffs_per_slice = ffs;
  return g;
}

const char* mode_name(TrackingMode m) { return m == TrackingMode::Tracked ? "tracked" : "store-all"; }

py::dict analysis_summary(const Analysis& a) {
  py::list trackers;
  for (const auto& s : a.specs) {
    py::dict t;
    t["function"] = s.function;
    t["iterations"] = s.iterations;
    t["count_max"] = s.count_max;
    t["width"] = s.width;
    t["mode"] = mode_name(s.mode);
    trackers.append(t);
  }
  py::dict live;
  for (std::size_t i = 0; i < a.live.size(); ++i) {
    py::dict table;
    table["checkpoint"] = a.live[i].checkpoint;
    table["resume"] = a.live[i].resume;
    live[py::str(a.program.functions[i].id)] = table;
  }
  py::dict d;
  d["functions"] = a.program.functions.size();
  d["renaming"] = a.renaming;
  d["trackers"] = trackers;
  d["live_sets"] = live;
  d["register_slices"] = a.placement.register_slices;
  d["tracker_slices"] = a.placement.tracker_slices;
  d["control_unit_rows"] = a.table.rows.size();
  d["bram"] = bram_usage(a.table);
  d["max_span"] = a.max_span();
  d["progress_cycles"] = progress_cycles(a);
  d["reference"] = a.reference;
  return d;
}

py::dict report_dict(const SimulationReport& r) {
  py::dict d;
  d["policy"] = std::string(to_string(r.policy));
  d["consistent"] = r.consistent;
  d["violations"] = r.violations;
  d["total_rollback"] = r.total_rollback;
  d["rollbacks"] = r.rollbacks;
  d["ff_stores"] = r.ff_stores;
  d["outage_ff_stores"] = r.outage_ff_stores;
  d["slice_stores"] = r.slice_stores;
  d["bram"] = r.bram;
  d["progress_cycles"] = r.progress_cycles;
  d["wall_cycles"] = r.wall_cycles;
  d["final_state"] = r.final_state;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tracker-guided checkpoint analysis and intermittent-power simulation";

  auto base = py::register_exception<Error>(m, "DftsimError");
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<CorruptionError>(m, "CorruptionError", base.ptr());
  py::register_exception<PlacementError>(m, "PlacementError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def("max_trackable_cycles", &max_trackable_cycles, py::arg("width"));
  m.def(
      "tracker_resources",
      [](std::uint32_t w) {
        const auto c = tracker_resources(w);
        return py::make_tuple(c.ff, c.lut);
      },
      py::arg("width"), "(FF, LUT) of a tracker of the given bit width.");
  m.def(
      "cu_resources",
      [](std::uint32_t w) {
        const auto c = cu_resources(w);
        return py::make_tuple(c.ff, c.lut, c.bram);
      },
      py::arg("width"), "(FF, LUT, BRAM) of the control unit.");

  m.def("preset_names", &preset_names);
  m.def(
      "preset_program", [](const std::string& name) { return to_json(generate(preset(name))); }, py::arg("name"),
      "Program JSON generated from a built-in benchmark shape.");
  m.def(
      "generate", [](const std::string& shape_json) { return to_json(generate(parse_shape(shape_json))); },
      py::arg("shape_json"));

  m.def(
      "validate",
      [](const std::string& program_json) {
        py::list out;
        for (const auto& v : validate(parse_program(program_json)))
          out.append(py::make_tuple(v.kind, v.entity, v.message));
        return out;
      },
      py::arg("program_json"), "List of (kind, entity, message) violations.");
  m.def(
      "execute_reference", [](const std::string& program_json) { return execute_reference(parse_program(program_json)); },
      py::arg("program_json"));
  m.def(
      "normalize", [](const std::string& program_json) { return to_json(normalize(parse_program(program_json)).program); },
      py::arg("program_json"));

  m.def(
      "analyze",
      [](const std::string& program_json, std::uint32_t width, std::uint32_t height, std::uint32_t ffs) {
        return analysis_summary(analyze(parse_program(program_json), grid_of(width, height, ffs)));
      },
      py::arg("program_json"), py::arg("grid_width") = 100, py::arg("grid_height") = 100,
      py::arg("ffs_per_slice") = 8);

  m.def("gen_trace", [](std::uint64_t total, std::uint32_t k, std::uint64_t seed) { return gen_trace(total, k, seed).points; },
        py::arg("total_cycles"), py::arg("k"), py::arg("seed"));

  m.def(
      "simulate",
      [](const std::string& program_json, const std::string& policy, std::vector<std::uint64_t> outages) {
        const auto a = analyze(parse_program(program_json));
        PowerTrace t;
        t.total_cycles = progress_cycles(a);
        std::sort(outages.begin(), outages.end());
        t.points = std::move(outages);
        const auto kind = policy_from_string(policy);
        SimulationReport rep;
        {
          py::gil_scoped_release release;
          rep = run(a, kind, t);
        }
        return report_dict(rep);
      },
      py::arg("program_json"), py::arg("policy"), py::arg("outages") = std::vector<std::uint64_t>{},
      "Runs one policy with outages at the given progress points.");

  m.def(
      "monte_carlo",
      [](const std::string& program_json, const std::string& benchmark, std::vector<std::string> policies,
         std::uint32_t k_min, std::uint32_t k_max, std::uint32_t rounds, std::uint64_t seed) {
        const auto a = analyze(parse_program(program_json));
        MonteCarloConfig cfg;
        cfg.benchmark = benchmark;
        cfg.policies.clear();
        for (const auto& p : policies) cfg.policies.push_back(policy_from_string(p));
        cfg.k_min = k_min;
        cfg.k_max = k_max;
        cfg.rounds = rounds;
        cfg.seed = seed;
        std::vector<MonteCarloCell> cells;
        {
          py::gil_scoped_release release;
          cells = run_monte_carlo(a, cfg);
        }
        py::list out;
        for (const auto& c : cells) {
          py::dict d;
          d["policy"] = std::string(to_string(c.policy));
          d["k"] = c.k;
          d["seeds"] = c.seeds;
          d["rollback"] = c.rollback;
          d["ff_stores"] = c.ff_stores;
          d["mean_rollback"] = c.mean_rollback();
          d["mean_ff_stores"] = c.mean_ff_stores();
          d["inconsistent"] = c.inconsistent;
          out.append(d);
        }
        return out;
      },
      py::arg("program_json"), py::arg("benchmark"), py::arg("policies") = std::vector<std::string>{"dft", "cp"},
      py::arg("k_min") = 1, py::arg("k_max") = 10, py::arg("rounds") = 10, py::arg("seed") = 1);

  m.def("cell_seed",
        [](std::uint64_t base, const std::string& bench, const std::string& policy, std::uint32_t k,
           std::uint32_t round) { return cell_seed(base, bench, policy_from_string(policy), k, round); },
        py::arg("base"), py::arg("benchmark"), py::arg("policy"), py::arg("k"), py::arg("round"));
}

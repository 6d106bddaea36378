#pragma once

// Offline flow from a raw program to everything the runtime needs:
// normalization, live sets, tracker sizing, placement and the control-unit table.

#include <map>
#include <vector>

#include "dftsim/control_unit.hpp"
#include "dftsim/liveness.hpp"
#include "dftsim/placement.hpp"
#include "dftsim/resources.hpp"
#include "dftsim/transform.hpp"

namespace dftsim {

struct Analysis {
  Program raw;
  Program program;  // normalized
  std::map<FunctionId, std::vector<FunctionId>> renaming;
  std::vector<LiveSetTable> live;  // parallel to program.functions
  std::vector<TrackerSpec> specs;  // parallel to program.functions
  Placement placement;
  ControlUnitTable table;
  ResourceModel model;
  FinalState reference;  // execute_reference(raw)

  /// function id -> r(n) for every body cycle n, as the tracker restore wants it.
  std::map<FunctionId, std::vector<std::uint32_t>> resume_points() const;
  /// Flip-flops of every tracker and StoreAll control block.
  std::uint64_t tracker_flip_flops() const;
  /// Largest end - start over all operations.
  std::uint32_t max_span() const;
};

/// Throws ValidationError listing the first violation when the program is invalid.
Analysis analyze(const Program& raw, const GridConfig& grid = {}, const ResourceModel& model = {});

}  // namespace dftsim

#pragma once

// Function split and merge: reshapes a raw program so each function carries
// exactly one trackable region and no operations float under main.

#include <map>
#include <vector>

#include "dftsim/program.hpp"

namespace dftsim {

struct SplitResult {
  std::vector<Function> fragments;
  /// Sequential edges between consecutive fragments.
  std::vector<Dependency> chain;
};

/// One fragment per region, ids `<orig>__sN`. Values crossing a fragment
/// boundary become results of the producing fragment. A single-region
/// function comes back unchanged. Throws ValidationError("split dataflow
/// break") if a region reads a value only a later region produces.
SplitResult split(const Function& function);

/// Wraps every contiguous run of loose main-level blocks into a new
/// straight-line function `main__mK`, wired between the neighbouring calls,
/// and turns main-sequence ordering into explicit dependencies. A program
/// without a main sequence is returned unchanged.
Program merge(const Program& program);

struct Normalized {
  Program program;
  /// Original function id -> ids it became (identity for untouched functions).
  std::map<FunctionId, std::vector<FunctionId>> renaming;
};

/// merge, then split every function.
Normalized normalize(const Program& program);

}  // namespace dftsim

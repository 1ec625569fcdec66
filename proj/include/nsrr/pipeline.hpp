#pragma once

#include <vector>

#include "nsrr/chain.hpp"
#include "nsrr/rotation_solver.hpp"

namespace nsrr {

struct SolveReport {
  double objective_before = 0.0;  // objective at the identity registration
  double objective_after = 0.0;
  std::vector<double> per_pair_residuals;
  AngleSolution angle_solution;
  double wall_time_seconds = 0.0;
};

struct SolveResult {
  Registration registration;
  SolveReport report;
};

/// Runs the full two-stage solve: rotation stage (SVD factors plus the
/// sum-constrained angle problem), then closed-form translations. The
/// returned registration has its first and last transforms pinned to exact
/// identity / zero; the pin happens only after the composed chain is checked
/// to close within tolerance.
SolveResult nsrr_solve(const SectionChain& chain);

}  // namespace nsrr

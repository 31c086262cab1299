#pragma once

#include "udcran/model.hpp"

namespace udcran {

struct FixedAssignmentOptions {
  int maxIterations = 1500;
  double relativeTolerance = 1e-7;
  /// mu is kept above this fraction of its analytic upper bound.
  double muFloorFraction = 1e-6;
  int lambdaBisections = 100;
};

/// Re-optimises the powers of a fixed user association and RRH selection
/// (`assignment.userOnSc`, `assignment.rrhSet`; powers are ignored) under
/// the fronthaul and per-RRH power budgets.
///
/// The per-RRH budgets are dualised and minimised with the ellipsoid method;
/// the fronthaul multiplier is found exactly by bisection for each mu. The
/// returned allocation is feasible: residual budget violations are removed
/// by scaling, RRHs left without power are dropped from their subcarrier,
/// and time shares are filled in.
Allocation optimizeFixedAssignment(const NetworkInstance& inst, const Allocation& assignment,
                                   const FixedAssignmentOptions& opts = {});

}  // namespace udcran

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udcran/ellipsoid.hpp"
#include "udcran/fixed_assignment.hpp"
#include "udcran/model.hpp"
#include "udcran/subproblem.hpp"

namespace udcran {

enum class PrimalRecovery {
  repair,               // power scaling plus RRH de-selection only
  repairThenReoptimize  // additionally re-optimise powers for the best assignments
};

struct SolverOptions {
  SearchMode mode = SearchMode::exhaustive;
  SearchOptions search;
  EllipsoidOptions ellipsoid;
  PrimalRecovery recovery = PrimalRecovery::repairThenReoptimize;
  /// Distinct assignments from the lowest-value dual iterates that are
  /// re-optimised under repairThenReoptimize.
  int reoptimizeCandidates = 4;
  FixedAssignmentOptions fixedAssignment;
  /// Local search over one-change neighbours of the recovered assignment,
  /// only when N * M is at most this (the duality gap is small otherwise).
  int polishMaxPairs = 32;
  int polishMaxPasses = 20;
  /// With an inexact inner search (greedy), also evaluate the exhaustive dual
  /// function at the final point so the reported dual value is a valid bound.
  bool certifyDualValue = true;
  bool keepTrace = false;
};

struct DualEvaluation {
  double value = 0.0;
  std::vector<ScSolution> perSc;
  SearchCounters counters;
};

/// g(lambda, mu) = sum_n L_n + lambda + sum_m mu_m Pbar_m with per-subcarrier
/// maximisers from bestUser.
DualEvaluation dualFunction(const NetworkInstance& inst, const DualPoint& dual, SearchMode mode,
                            const SearchOptions& opts = {});

/// (1 - fronthaul usage, Pbar_m - sum_n p_{m,n}) at the maximising primal.
Eigen::VectorXd subgradient(const NetworkInstance& inst, const DualPoint& dual,
                            const std::vector<ScSolution>& perSc);

/// Per-coordinate scale mapping the unit box onto a region that contains the
/// dual optimum: lambda <= omega_max max_m R_m and
/// mu_m <= omega_max B / (ln 2 Pbar_m).
struct DualScaling {
  double lambda = 1.0;
  std::vector<double> mu;

  static DualScaling forInstance(const NetworkInstance& inst);
  DualPoint toDual(const Eigen::VectorXd& y) const;
};

/// Per-subcarrier solutions assembled into an allocation. Time shares are the
/// raw per-RRH loads and may sum above 1.
Allocation assembleAllocation(const NetworkInstance& inst, const std::vector<ScSolution>& perSc);

/// Scales over-budget RRH powers down to the budget, then removes selected
/// (m, n) pairs, cheapest rate loss first, until the fronthaul fits.
Allocation repairFeasibility(const NetworkInstance& inst, Allocation alloc);

struct DualMinimum {
  DualPoint dualStar;
  double value = 0.0;
  EllipsoidResult ellipsoid;
  SearchCounters counters;
};

/// Ellipsoid minimisation of the dual function in scaled coordinates.
DualMinimum minimizeDual(const NetworkInstance& inst, const SolverOptions& opts = {});

/// Allocation at `dualStar`, made feasible (and re-optimised when requested).
Allocation recoverPrimal(const NetworkInstance& inst, const DualPoint& dualStar, const SolverOptions& opts = {});

struct SolveReport {
  double wsr = 0.0;        // bit/s
  double dualValue = 0.0;  // bit/s
  double gap = 0.0;
  Allocation allocation;
  int iterations = 0;
  int dualEvaluations = 0;
  std::string scheme;
  bool converged = false;
  /// Where the reported allocation came from: "final", "iterate",
  /// "reoptimized", "polished" or a benchmark-specific tag.
  std::string primalSource;
  SearchCounters counters;
  std::vector<EllipsoidStep> trace;
};

SolveReport solve(const NetworkInstance& inst, const SolverOptions& opts = {});

}  // namespace udcran

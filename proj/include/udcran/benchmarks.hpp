#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "udcran/dual_solver.hpp"

namespace udcran {

enum class Scheme { proposedExhaustive, proposedGreedy, singleRrh, equalPower, conventional };

/// CLI tag, e.g. "proposed-greedy".
std::string_view toString(Scheme scheme);
/// Throws std::invalid_argument listing the valid tags.
Scheme parseScheme(std::string_view tag);
const std::vector<Scheme>& allSchemes();

struct BenchmarkOptions {
  SolverOptions solver;
  /// Relative width at which the lambda (and mu) bisections stop.
  double bisectionTolerance = 1e-6;
  int maxBisections = 200;
};

/// At most one RRH per subcarrier; dual pipeline with the single-RRH search.
SolveReport solveSingleRrh(const NetworkInstance& inst, const BenchmarkOptions& opts = {});

/// Powers fixed to Pbar_m / N on every selected RRH; only lambda is dualised
/// and found by bisection on the fronthaul slack.
SolveReport solveEqualPower(const NetworkInstance& inst, const BenchmarkOptions& opts = {});

/// LTE-style baseline: contiguous blocks of floor(N/M) subcarriers per RRH,
/// users served by their nearest RRH only, and a fixed fronthaul share 1/M
/// per RRH. Needs user-RRH distances.
SolveReport solveConventionalOfdma(const NetworkInstance& inst, const BenchmarkOptions& opts = {});

/// Nearest RRH per user; ties go to the lower RRH index.
std::vector<int> nearestRrh(const NetworkInstance& inst);

SolveReport solveScheme(const NetworkInstance& inst, Scheme scheme, const BenchmarkOptions& opts = {});

}  // namespace udcran

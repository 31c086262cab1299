#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udcran/model.hpp"

// Reference implementations for tests. Nothing here calls the subproblem,
// dual-solver or benchmark code; rates and objectives are recomputed locally.
namespace udcran::oracle {

struct TinyInstanceSpec {
  int rrhs = 2;
  int users = 2;
  int subcarriers = 3;
};

/// Number of global (user, RRH subset) assignments bruteForceWsr enumerates.
double assignmentCount(const TinyInstanceSpec& spec);

/// Enumeration limit for bruteForceWsr.
inline constexpr double kMaxAssignments = 2e4;

/// Dims drawn from a list of tiny shapes (M <= 3, K <= 3, N <= 6) whose
/// assignment count stays below kMaxAssignments.
TinyInstanceSpec randomTinySpec(std::uint64_t seed);

/// Random instance from the channel generator with the given tiny dims; the
/// fronthaul bandwidth is drawn so that the fronthaul binds on some draws
/// and not on others.
NetworkInstance tinyInstance(const TinyInstanceSpec& spec, std::uint64_t seed);

/// Objective of the per-subcarrier problem for given powers:
/// (w_k - lambda sum 1/R_m) r - sum mu_m p_m.
double fixedSelectionObjective(const NetworkInstance& inst, int n, int k, RrhSet set,
                               const std::vector<double>& power, double lambda, const std::vector<double>& mu);

struct SpgOptions {
  int maxIterations = 20000;
  double gradientTolerance = 1e-8;  // on the scaled projected gradient
};

/// Spectral projected gradient ascent on the concave per-subcarrier problem
/// for a fixed user and RRH set. Throws std::invalid_argument if
/// w_k - lambda sum 1/R_m <= 0 (the problem is then not concave) or if any
/// selected mu_m is not positive.
std::vector<double> concaveFixedSelectionMax(const NetworkInstance& inst, int n, int k, RrhSet set, double lambda,
                                             const std::vector<double>& mu, const SpgOptions& opts = {});

/// Best (user, subset) for subcarrier n by enumeration with the SPG power
/// solver; value 0 means the empty association. `singleOnly` restricts to
/// singletons.
struct ScBruteForce {
  int user = -1;
  RrhSet set;
  std::vector<double> power;
  double value = 0.0;
};
ScBruteForce bruteForceSubproblem(const NetworkInstance& inst, int n, double lambda, const std::vector<double>& mu,
                                  bool singleOnly = false);

/// Fixed powers Pbar_m / N; enumerates subsets for user k. With
/// `chargePowerCost`, selected RRHs pay mu_m Pbar_m / N.
ScBruteForce bruteForceEqualPower(const NetworkInstance& inst, int n, int k, double lambda,
                                  const std::vector<double>& mu, bool chargePowerCost);

struct BruteForceResult {
  double wsr = 0.0;  // bit/s
  Allocation allocation;
  /// Upper bound certified by the dual of the best assignment.
  double assignmentDualBound = 0.0;
  std::uint64_t assignments = 0;
  std::uint64_t evaluated = 0;  // assignments solved exactly (the rest were pruned)
};

/// Global optimum over all user/RRH-subset assignments. Each assignment's
/// power problem is solved by projected gradient under the per-RRH budgets,
/// with the fronthaul constraint handled by bisection on its multiplier.
/// Assignments whose Lagrangian bound cannot beat the incumbent are skipped.
/// Throws std::invalid_argument for instances above kMaxAssignments.
BruteForceResult bruteForceWsr(const NetworkInstance& inst);

/// Optimum of one fixed assignment (`assignment.userOnSc`/`rrhSet`).
/// `dualBound` receives an upper bound on that optimum.
Allocation fixedAssignmentOptimum(const NetworkInstance& inst, const Allocation& assignment, double* dualBound = nullptr);

/// Exhaustive grid over powers for N <= 2 and M <= 2: each RRH power on each
/// subcarrier takes `levels` values in [0, Pbar_m]. Cross-check only.
double gridWsr(const NetworkInstance& inst, int levels);

struct SubmodularityReport {
  std::uint64_t triplesChecked = 0;
  std::uint64_t violations = 0;
  double worstViolation = 0.0;  // most negative (lhs - rhs), scaled
  std::uint64_t strictTriples = 0;
  std::uint64_t identityChecks = 0;
  std::uint64_t identityMismatches = 0;
  double worstIdentityError = 0.0;
  std::string witness;

  bool passed() const { return violations == 0 && identityMismatches == 0; }
};

/// Checks gamma(S+i) - gamma(S) >= gamma(S+i+j) - gamma(S+j) for every S and
/// distinct i, j outside S, and the closed-form increment of F*G. Tolerances
/// are `tol` times the magnitude of the compared terms (at least 1).
SubmodularityReport submodularityCheck(const NetworkInstance& inst, int n, int k, double lambda,
                                       const std::vector<double>& mu, double tol = 1e-12);

}  // namespace udcran::oracle

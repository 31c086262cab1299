#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "udcran/model.hpp"

namespace udcran {

/// RRH-set search used inside each per-subcarrier subproblem.
enum class SearchMode { exhaustive, greedy, singleRrh, equalPower };

std::string_view toString(SearchMode mode);

/// Exhaustive enumeration refuses clusters larger than this.
inline constexpr int kMaxExhaustiveRrhs = 25;

/// Solution of the per-subcarrier dual subproblem.
struct ScSolution {
  std::optional<int> user;
  RrhSet rrhSet;
  std::vector<double> power;  // size M
  double objective = 0.0;
};

struct SearchOptions {
  /// Equal-power search: charge mu_m * Pbar_m / N for every selected RRH.
  bool chargeEqualPowerCost = true;
};

/// Instrumentation for the complexity checks.
struct SearchCounters {
  std::uint64_t searchCalls = 0;
  std::uint64_t setEvaluations = 0;

  SearchCounters& operator+=(const SearchCounters& other) {
    searchCalls += other.searchCalls;
    setEvaluations += other.setEvaluations;
    return *this;
  }
};

/// Closed-form optimal powers for a fixed user and RRH set. Returns a
/// length-M vector that is zero outside `set`, and all zero when the optimal
/// SNR is not positive.
std::vector<double> optimalPower(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual);

/// (omega_k - lambda sum 1/R_m) r - sum mu_m p_m for the given powers.
double subproblemObjective(const NetworkInstance& inst, int n, int k, RrhSet set,
                           std::span<const double> power, const DualPoint& dual);

// Each RRH search accepts an absent user; every subset then scores zero but
// is still visited, so the counters reflect the full search.

ScSolution exhaustiveRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                               SearchCounters* counters = nullptr);
ScSolution greedyRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                           SearchCounters* counters = nullptr);
ScSolution singleRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                           SearchCounters* counters = nullptr);
ScSolution equalPowerSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                            const SearchOptions& opts = {}, SearchCounters* counters = nullptr);

ScSolution searchRrhs(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                      SearchMode mode, const SearchOptions& opts = {}, SearchCounters* counters = nullptr);

/// Best user (or none) for subcarrier n. Runs the RRH search once for the
/// empty association and once per user; ties go to the lower user index and
/// the empty association wins ties at zero.
ScSolution bestUser(const NetworkInstance& inst, int n, const DualPoint& dual, SearchMode mode,
                    const SearchOptions& opts = {}, SearchCounters* counters = nullptr);

}  // namespace udcran

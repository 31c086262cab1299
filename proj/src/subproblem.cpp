#include "udcran/subproblem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace udcran {

std::string_view toString(SearchMode mode) {
  switch (mode) {
    case SearchMode::exhaustive: return "exhaustive";
    case SearchMode::greedy: return "greedy";
    case SearchMode::singleRrh: return "single-rrh";
    case SearchMode::equalPower: return "equal-power";
  }
  return "unknown";
}

namespace {

/// Per-(n, k) quantities shared by every subset evaluation.
struct ScTerms {
  std::vector<double> inverseRate;  // 1/R_m
  std::vector<double> accessTerm;   // |h|^2 / (sigma^2 mu_m), zero without a user
  double weight = 0.0;
  double ratePerSc = 0.0;
};

ScTerms makeTerms(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual) {
  const int M = inst.rrhs();
  ScTerms t;
  t.inverseRate.resize(M);
  t.accessTerm.assign(M, 0.0);
  t.ratePerSc = inst.bandwidthPerSc();
  for (int m = 0; m < M; ++m) t.inverseRate[m] = 1.0 / inst.fronthaulRate(m);
  if (k) {
    t.weight = inst.weight(*k);
    for (int m = 0; m < M; ++m) t.accessTerm[m] = inst.gain(*k, m, n) / (inst.noisePower() * flooredMu(dual.mu[m]));
  }
  return t;
}

ScSolution finish(const NetworkInstance& inst, int n, std::optional<int> k, RrhSet set, const DualPoint& dual) {
  ScSolution s;
  s.power.assign(inst.rrhs(), 0.0);
  if (!k || set.empty()) return s;
  s.power = optimalPower(inst, n, *k, set, dual);
  bool anyPower = false;
  for (double p : s.power) anyPower = anyPower || p > 0;
  if (!anyPower) {
    s.power.assign(inst.rrhs(), 0.0);
    return s;
  }
  s.user = k;
  s.rrhSet = set;
  s.objective = setObjective(inst, n, *k, set, dual);
  return s;
}

/// Running maximum over subsets; ties go to the smaller set, then the lower
/// bitmask, independent of visiting order.
struct SubsetBest {
  double value = 0.0;
  RrhSet set;

  void offer(double candidateValue, RrhSet candidate) {
    if (candidateValue > value ||
        (candidateValue == value && (candidate.size() < set.size() ||
                                     (candidate.size() == set.size() && candidate.bits() < set.bits())))) {
      value = candidateValue;
      set = candidate;
    }
  }
};

/// Depth-first walk over all 2^M subsets carrying two additive sums.
template <typename Visit>
void forEachSubset(int rrhs, Visit&& visit, const std::vector<double>& first, const std::vector<double>& second) {
  auto walk = [&](auto&& self, int m, RrhSet set, double a, double b) -> void {
    if (m == rrhs) {
      visit(set, a, b);
      return;
    }
    self(self, m + 1, set, a, b);
    self(self, m + 1, set.with(m), a + first[m], b + second[m]);
  };
  walk(walk, 0, RrhSet{}, 0.0, 0.0);
}

void checkExhaustiveSize(int rrhs) {
  if (rrhs > kMaxExhaustiveRrhs) {
    throw std::invalid_argument("exhaustive RRH search limited to M <= " + std::to_string(kMaxExhaustiveRrhs) +
                                " (M = " + std::to_string(rrhs) + "); use the greedy search");
  }
}

}  // namespace

std::vector<double> optimalPower(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual) {
  std::vector<double> power(inst.rrhs(), 0.0);
  if (set.empty()) return power;
  const double F = setF(inst, n, k, set, dual.lambda);
  const double G = setG(inst, n, k, set, dual.mu);
  const double gamma = snrScale(inst) * F * G - 1.0;
  if (!(gamma > 0.0)) return power;
  const double sigma2 = inst.noisePower();
  for (int m : set) {
    const double mu = flooredMu(dual.mu[m]);
    power[m] = inst.gain(k, m, n) / (sigma2 * mu * mu * G * G) * gamma;
  }
  return power;
}

double subproblemObjective(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> power,
                           const DualPoint& dual) {
  double cost = 0.0;
  for (int m : set) cost += dual.mu[m] * power[m];
  return setF(inst, n, k, set, dual.lambda) * scRate(inst, n, k, set, power) - cost;
}

ScSolution exhaustiveRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                               SearchCounters* counters) {
  const int M = inst.rrhs();
  checkExhaustiveSize(M);
  const ScTerms t = makeTerms(inst, n, k, dual);
  SubsetBest best;
  forEachSubset(M, [&](RrhSet set, double inverseRate, double access) {
    best.offer(objectiveFromFG(t.weight - dual.lambda * inverseRate, access, t.ratePerSc), set);
  }, t.inverseRate, t.accessTerm);
  if (counters) {
    ++counters->searchCalls;
    counters->setEvaluations += std::uint64_t{1} << M;  // the empty set scores zero by definition
  }
  return finish(inst, n, k, best.set, dual);
}

ScSolution greedyRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                           SearchCounters* counters) {
  const int M = inst.rrhs();
  const ScTerms t = makeTerms(inst, n, k, dual);
  RrhSet current;
  double currentValue = 0.0;
  double currentInverseRate = 0.0;
  double currentAccess = 0.0;
  std::uint64_t evaluations = 0;
  for (int iteration = 0; iteration < M; ++iteration) {
    int candidate = -1;
    double candidateValue = 0.0;
    for (int l = 0; l < M; ++l) {
      if (current.contains(l)) continue;
      const double F = t.weight - dual.lambda * (currentInverseRate + t.inverseRate[l]);
      const double value = objectiveFromFG(F, currentAccess + t.accessTerm[l], t.ratePerSc);
      ++evaluations;
      if (candidate < 0 || value > candidateValue) {
        candidate = l;
        candidateValue = value;
      }
    }
    if (!(candidateValue > currentValue)) break;
    current = current.with(candidate);
    currentValue = candidateValue;
    currentInverseRate += t.inverseRate[candidate];
    currentAccess += t.accessTerm[candidate];
  }
  if (counters) {
    ++counters->searchCalls;
    counters->setEvaluations += evaluations;
  }
  return finish(inst, n, k, current, dual);
}

ScSolution singleRrhSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                           SearchCounters* counters) {
  const int M = inst.rrhs();
  const ScTerms t = makeTerms(inst, n, k, dual);
  double bestValue = 0.0;
  RrhSet bestSet;
  for (int m = 0; m < M; ++m) {
    const double value = objectiveFromFG(t.weight - dual.lambda * t.inverseRate[m], t.accessTerm[m], t.ratePerSc);
    if (value > bestValue) {
      bestValue = value;
      bestSet = RrhSet::single(m);
    }
  }
  if (counters) {
    ++counters->searchCalls;
    counters->setEvaluations += static_cast<std::uint64_t>(M);
  }
  return finish(inst, n, k, bestSet, dual);
}

ScSolution equalPowerSearch(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                            const SearchOptions& opts, SearchCounters* counters) {
  const int M = inst.rrhs();
  checkExhaustiveSize(M);
  const int N = inst.subcarriers();
  const std::uint64_t subsets = std::uint64_t{1} << M;
  const double ratePerSc = inst.bandwidthPerSc();

  std::vector<double> fixedPower(M);
  std::vector<double> amplitudeTerm(M, 0.0);
  std::vector<double> costTerm(M, 0.0);
  for (int m = 0; m < M; ++m) {
    fixedPower[m] = inst.maxPower(m) / N;
    if (k) amplitudeTerm[m] = inst.amplitude(*k, m, n) * std::sqrt(fixedPower[m]);
    if (opts.chargeEqualPowerCost) costTerm[m] = dual.mu[m] * fixedPower[m];
  }
  const double weight = k ? inst.weight(*k) : 0.0;

  std::vector<double> inverseRate(M);
  for (int m = 0; m < M; ++m) inverseRate[m] = 1.0 / inst.fronthaulRate(m);
  SubsetBest best;
  forEachSubset(M, [&](RrhSet set, double inverseRates, double amplitude) {
    double value = 0.0;
    if (k && !set.empty()) {
      double cost = 0.0;
      for (int m : set) cost += costTerm[m];
      const double rate = ratePerSc * std::log1p(amplitude * amplitude / inst.noisePower()) / std::numbers::ln2;
      value = (weight - dual.lambda * inverseRates) * rate - cost;
    }
    best.offer(value, set);
  }, inverseRate, amplitudeTerm);
  if (counters) {
    ++counters->searchCalls;
    counters->setEvaluations += subsets;
  }

  ScSolution s;
  s.power.assign(M, 0.0);
  if (!k || best.set.empty()) return s;
  s.user = k;
  s.rrhSet = best.set;
  for (int m : best.set) s.power[m] = fixedPower[m];
  s.objective = best.value;
  return s;
}

ScSolution searchRrhs(const NetworkInstance& inst, int n, std::optional<int> k, const DualPoint& dual,
                      SearchMode mode, const SearchOptions& opts, SearchCounters* counters) {
  switch (mode) {
    case SearchMode::exhaustive: return exhaustiveRrhSearch(inst, n, k, dual, counters);
    case SearchMode::greedy: return greedyRrhSearch(inst, n, k, dual, counters);
    case SearchMode::singleRrh: return singleRrhSearch(inst, n, k, dual, counters);
    case SearchMode::equalPower: return equalPowerSearch(inst, n, k, dual, opts, counters);
  }
  throw std::logic_error("unknown search mode");
}

ScSolution bestUser(const NetworkInstance& inst, int n, const DualPoint& dual, SearchMode mode,
                    const SearchOptions& opts, SearchCounters* counters) {
  ScSolution best = searchRrhs(inst, n, std::nullopt, dual, mode, opts, counters);
  for (int k = 0; k < inst.users(); ++k) {
    ScSolution candidate = searchRrhs(inst, n, k, dual, mode, opts, counters);
    if (candidate.objective > best.objective) best = std::move(candidate);
  }
  return best;
}

}  // namespace udcran

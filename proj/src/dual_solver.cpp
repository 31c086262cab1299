#include "udcran/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <tuple>

namespace udcran {

DualEvaluation dualFunction(const NetworkInstance& inst, const DualPoint& dual, SearchMode mode,
                            const SearchOptions& opts) {
  DualEvaluation ev;
  ev.perSc.reserve(inst.subcarriers());
  double total = 0.0;
  for (int n = 0; n < inst.subcarriers(); ++n) {
    ev.perSc.push_back(bestUser(inst, n, dual, mode, opts, &ev.counters));
    total += ev.perSc.back().objective;
  }
  total += dual.lambda;
  for (int m = 0; m < inst.rrhs(); ++m) total += dual.mu[m] * inst.maxPower(m);
  ev.value = total;
  return ev;
}

Eigen::VectorXd subgradient(const NetworkInstance& inst, const DualPoint& /*dual*/,
                            const std::vector<ScSolution>& perSc) {
  const int M = inst.rrhs();
  Eigen::VectorXd g(M + 1);
  double usage = 0.0;
  for (int m = 0; m < M; ++m) g[m + 1] = inst.maxPower(m);
  for (int n = 0; n < static_cast<int>(perSc.size()); ++n) {
    const ScSolution& s = perSc[n];
    if (!s.user || s.rrhSet.empty()) continue;
    const double rate = scRate(inst, n, *s.user, s.rrhSet, s.power);
    for (int m : s.rrhSet) {
      usage += rate / inst.fronthaulRate(m);
      g[m + 1] -= s.power[m];
    }
  }
  g[0] = 1.0 - usage;
  return g;
}

DualScaling DualScaling::forInstance(const NetworkInstance& inst) {
  const double omega = inst.maxWeight() > 0 ? inst.maxWeight() : 1.0;
  DualScaling s;
  s.lambda = omega * *std::max_element(inst.fronthaulRates().begin(), inst.fronthaulRates().end());
  s.mu.resize(inst.rrhs());
  for (int m = 0; m < inst.rrhs(); ++m) {
    s.mu[m] = omega * inst.dims().accessBandwidthHz / (std::numbers::ln2 * inst.maxPower(m));
  }
  return s;
}

DualPoint DualScaling::toDual(const Eigen::VectorXd& y) const {
  DualPoint d;
  d.lambda = std::max(0.0, y[0]) * lambda;
  d.mu.resize(mu.size());
  for (std::size_t m = 0; m < mu.size(); ++m) d.mu[m] = std::max(0.0, y[static_cast<Eigen::Index>(m) + 1]) * mu[m];
  return d;
}

Allocation assembleAllocation(const NetworkInstance& inst, const std::vector<ScSolution>& perSc) {
  Allocation a = Allocation::empty(inst.dims());
  for (int n = 0; n < inst.subcarriers(); ++n) {
    const ScSolution& s = perSc[n];
    if (!s.user || s.rrhSet.empty()) continue;
    a.userOnSc[n] = s.user;
    a.rrhSet[n] = s.rrhSet;
    for (int m : s.rrhSet) a.power(m, n) = s.power[m];
  }
  for (int n = 0; n < inst.subcarriers(); ++n) {
    const double rate = allocatedScRate(inst, a, n);
    for (int m : a.rrhSet[n]) a.timeShare[m] += rate / inst.fronthaulRate(m);
  }
  return a;
}

namespace {

double inverseRateSum(const NetworkInstance& inst, RrhSet set) {
  double c = 0.0;
  for (int m : set) c += 1.0 / inst.fronthaulRate(m);
  return c;
}

}  // namespace

Allocation repairFeasibility(const NetworkInstance& inst, Allocation a) {
  const int M = inst.rrhs();
  const int N = a.subcarriers();
  for (int m = 0; m < M; ++m) {
    const double used = totalPower(a, m);
    if (used > inst.maxPower(m)) {
      const double factor = inst.maxPower(m) / used;
      for (int n = 0; n < N; ++n) a.power(m, n) *= factor;
    }
  }

  // (rate drop, n, m, version of SC n when pushed); smallest drop first, then
  // lower n, then lower m.
  using Candidate = std::tuple<double, int, int, int>;
  std::vector<int> version(N, 0);
  std::vector<double> rate(N, 0.0);
  auto push = [&](auto& heap, int n) {
    if (!a.userOnSc[n]) return;
    const int k = *a.userOnSc[n];
    for (int m : a.rrhSet[n]) {
      const RrhSet rest = a.rrhSet[n].without(m);
      const double reduced = rest.empty() ? 0.0 : scRate(inst, n, k, rest, a.scPowers(n));
      heap.emplace(rate[n] - reduced, n, m, version[n]);
    }
  };

  while (fronthaulUsage(inst, a) > 1.0) {
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
    double usage = 0.0;
    for (int n = 0; n < N; ++n) {
      rate[n] = allocatedScRate(inst, a, n);
      usage += rate[n] * inverseRateSum(inst, a.rrhSet[n]);
      push(heap, n);
    }
    while (usage > 1.0 && !heap.empty()) {
      const auto [drop, n, m, ver] = heap.top();
      heap.pop();
      if (ver != version[n]) continue;
      const double before = rate[n] * inverseRateSum(inst, a.rrhSet[n]);
      a.rrhSet[n] = a.rrhSet[n].without(m);
      a.power(m, n) = 0.0;
      if (a.rrhSet[n].empty()) a.userOnSc[n].reset();
      rate[n] = allocatedScRate(inst, a, n);
      usage += rate[n] * inverseRateSum(inst, a.rrhSet[n]) - before;
      ++version[n];
      push(heap, n);
    }
    if (heap.empty() && usage > 1.0) break;
  }
  for (int n = 0; n < N; ++n) {
    if (allocatedScRate(inst, a, n) == 0.0 && a.userOnSc[n]) {
      for (int m : a.rrhSet[n]) a.power(m, n) = 0.0;
      a.rrhSet[n] = RrhSet{};
      a.userOnSc[n].reset();
    }
  }
  a.timeShare = timeShares(inst, a);
  return a;
}

namespace {

struct AssignmentKey {
  double value;
  std::vector<std::optional<int>> users;
  std::vector<RrhSet> sets;
};

/// Keeps the `capacity` lowest-value distinct assignments.
class CandidatePool {
 public:
  explicit CandidatePool(int capacity) : capacity_(capacity) {}

  void offer(double value, const Allocation& a) {
    if (capacity_ <= 0) return;
    for (auto& c : pool_) {
      if (c.users == a.userOnSc && c.sets == a.rrhSet) {
        c.value = std::min(c.value, value);
        sort();
        return;
      }
    }
    if (static_cast<int>(pool_.size()) == capacity_ && value >= pool_.back().value) return;
    pool_.push_back({value, a.userOnSc, a.rrhSet});
    sort();
    if (static_cast<int>(pool_.size()) > capacity_) pool_.pop_back();
  }

  const std::vector<AssignmentKey>& entries() const { return pool_; }

 private:
  void sort() {
    std::stable_sort(pool_.begin(), pool_.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
  }
  int capacity_;
  std::vector<AssignmentKey> pool_;
};

/// Assignments one change away: one RRH toggled or exchanged for another on
/// a subcarrier, the user of a served subcarrier swapped, or an idle
/// subcarrier given one (user, RRH).
std::vector<Allocation> neighbours(const NetworkInstance& inst, const Allocation& a) {
  std::vector<Allocation> out;
  for (int n = 0; n < a.subcarriers(); ++n) {
    if (a.userOnSc[n]) {
      for (int m = 0; m < inst.rrhs(); ++m) {
        Allocation b = a;
        b.rrhSet[n] = a.rrhSet[n].contains(m) ? a.rrhSet[n].without(m) : a.rrhSet[n].with(m);
        if (b.rrhSet[n].empty()) b.userOnSc[n].reset();
        out.push_back(std::move(b));
      }
      for (int m : a.rrhSet[n]) {
        for (int l = 0; l < inst.rrhs(); ++l) {
          if (a.rrhSet[n].contains(l)) continue;
          Allocation b = a;
          b.rrhSet[n] = a.rrhSet[n].without(m).with(l);
          out.push_back(std::move(b));
        }
      }
      for (int k = 0; k < inst.users(); ++k) {
        if (k == *a.userOnSc[n]) continue;
        Allocation b = a;
        b.userOnSc[n] = k;
        out.push_back(std::move(b));
      }
    } else {
      for (int k = 0; k < inst.users(); ++k) {
        for (int m = 0; m < inst.rrhs(); ++m) {
          Allocation b = a;
          b.userOnSc[n] = k;
          b.rrhSet[n] = RrhSet::single(m);
          out.push_back(std::move(b));
        }
      }
    }
  }
  return out;
}

/// Best-improvement local search over fixed-assignment optima.
bool polish(const NetworkInstance& inst, const SolverOptions& opts, Allocation& best, double& bestWsr) {
  bool improved = false;
  for (int pass = 0; pass < opts.polishMaxPasses; ++pass) {
    Allocation passBest;
    double passWsr = bestWsr;
    for (const Allocation& candidate : neighbours(inst, best)) {
      Allocation reopt = optimizeFixedAssignment(inst, candidate, opts.fixedAssignment);
      const double wsr = weightedSumRate(inst, reopt);
      if (wsr > passWsr * (1 + 1e-12)) {
        passWsr = wsr;
        passBest = std::move(reopt);
      }
    }
    if (!(passWsr > bestWsr)) break;
    best = std::move(passBest);
    bestWsr = passWsr;
    improved = true;
  }
  return improved;
}

EllipsoidState initialEllipsoid(int dim) {
  return EllipsoidState::ball(Eigen::VectorXd::Constant(dim, 0.5), std::sqrt(static_cast<double>(dim)));
}

}  // namespace

DualMinimum minimizeDual(const NetworkInstance& inst, const SolverOptions& opts) {
  const DualScaling scaling = DualScaling::forInstance(inst);
  const int dim = inst.rrhs() + 1;
  DualMinimum out;
  ConvexOracle oracle = [&](const Eigen::VectorXd& y, Eigen::VectorXd& g) {
    const DualPoint dual = scaling.toDual(y);
    DualEvaluation ev = dualFunction(inst, dual, opts.mode, opts.search);
    out.counters += ev.counters;
    const Eigen::VectorXd raw = subgradient(inst, dual, ev.perSc);
    g[0] = raw[0] * scaling.lambda;
    for (int m = 0; m < inst.rrhs(); ++m) g[m + 1] = raw[m + 1] * scaling.mu[m];
    return ev.value;
  };
  out.ellipsoid = ellipsoidMinimize(initialEllipsoid(dim), oracle, opts.ellipsoid);
  out.dualStar = scaling.toDual(out.ellipsoid.best);
  out.value = out.ellipsoid.bestValue;
  return out;
}

Allocation recoverPrimal(const NetworkInstance& inst, const DualPoint& dualStar, const SolverOptions& opts) {
  const DualEvaluation ev = dualFunction(inst, dualStar, opts.mode, opts.search);
  const Allocation assembled = assembleAllocation(inst, ev.perSc);
  Allocation best = repairFeasibility(inst, assembled);
  if (opts.recovery == PrimalRecovery::repairThenReoptimize && opts.mode != SearchMode::equalPower) {
    Allocation reopt = optimizeFixedAssignment(inst, assembled, opts.fixedAssignment);
    if (weightedSumRate(inst, reopt) > weightedSumRate(inst, best)) best = std::move(reopt);
  }
  return best;
}

SolveReport solve(const NetworkInstance& inst, const SolverOptions& opts) {
  const DualScaling scaling = DualScaling::forInstance(inst);
  const int dim = inst.rrhs() + 1;

  SolveReport report;
  report.scheme = std::string(toString(opts.mode));
  Allocation best = Allocation::empty(inst.dims());
  best.timeShare.assign(inst.rrhs(), 0.0);
  double bestWsr = 0.0;
  int bestEvaluation = -1;
  int evaluation = 0;
  int lowestValueEvaluation = -1;
  double lowestValue = 0.0;
  CandidatePool pool(opts.recovery == PrimalRecovery::repairThenReoptimize ? opts.reoptimizeCandidates : 0);

  ConvexOracle oracle = [&](const Eigen::VectorXd& y, Eigen::VectorXd& g) {
    const DualPoint dual = scaling.toDual(y);
    DualEvaluation ev = dualFunction(inst, dual, opts.mode, opts.search);
    report.counters += ev.counters;
    const Eigen::VectorXd raw = subgradient(inst, dual, ev.perSc);
    g[0] = raw[0] * scaling.lambda;
    for (int m = 0; m < inst.rrhs(); ++m) g[m + 1] = raw[m + 1] * scaling.mu[m];

    const Allocation assembled = assembleAllocation(inst, ev.perSc);
    Allocation repaired = repairFeasibility(inst, assembled);
    pool.offer(ev.value, assembled);
    pool.offer(ev.value, repaired);
    if (lowestValueEvaluation < 0 || ev.value < lowestValue) {
      lowestValue = ev.value;
      lowestValueEvaluation = evaluation;
    }
    const double wsr = weightedSumRate(inst, repaired);
    if (wsr > bestWsr) {
      bestWsr = wsr;
      best = std::move(repaired);
      bestEvaluation = evaluation;
    }
    ++evaluation;
    return ev.value;
  };

  const EllipsoidResult er = ellipsoidMinimize(initialEllipsoid(dim), oracle, opts.ellipsoid);
  report.iterations = er.iterations;
  report.dualEvaluations = er.evaluations;
  report.converged = er.converged;
  report.dualValue = er.bestValue;
  report.primalSource = bestEvaluation == lowestValueEvaluation ? "final" : "iterate";

  for (const AssignmentKey& key : pool.entries()) {
    Allocation assignment = Allocation::empty(inst.dims());
    assignment.userOnSc = key.users;
    assignment.rrhSet = key.sets;
    Allocation reopt = optimizeFixedAssignment(inst, assignment, opts.fixedAssignment);
    const double wsr = weightedSumRate(inst, reopt);
    if (wsr > bestWsr) {
      bestWsr = wsr;
      best = std::move(reopt);
      report.primalSource = "reoptimized";
    }
  }

  const bool joint = opts.mode == SearchMode::exhaustive || opts.mode == SearchMode::greedy;
  if (joint && opts.recovery == PrimalRecovery::repairThenReoptimize &&
      inst.subcarriers() * inst.rrhs() <= opts.polishMaxPairs && polish(inst, opts, best, bestWsr)) {
    report.primalSource = "polished";
  }

  if (opts.mode == SearchMode::greedy && opts.certifyDualValue && inst.rrhs() <= kMaxExhaustiveRrhs) {
    report.dualValue = dualFunction(inst, scaling.toDual(er.best), SearchMode::exhaustive, opts.search).value;
  }

  report.wsr = bestWsr;
  report.allocation = std::move(best);
  report.gap = report.dualValue - report.wsr;
  if (opts.keepTrace) report.trace = er.trace;
  return report;
}

}  // namespace udcran

#include "udcran/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace udcran {

std::string_view toString(Scheme scheme) {
  switch (scheme) {
    case Scheme::proposedExhaustive: return "proposed-exhaustive";
    case Scheme::proposedGreedy: return "proposed-greedy";
    case Scheme::singleRrh: return "single-rrh";
    case Scheme::equalPower: return "equal-power";
    case Scheme::conventional: return "conventional";
  }
  return "unknown";
}

const std::vector<Scheme>& allSchemes() {
  static const std::vector<Scheme> schemes{Scheme::proposedExhaustive, Scheme::proposedGreedy, Scheme::singleRrh,
                                           Scheme::equalPower, Scheme::conventional};
  return schemes;
}

Scheme parseScheme(std::string_view tag) {
  for (Scheme s : allSchemes()) {
    if (toString(s) == tag) return s;
  }
  std::string valid;
  for (Scheme s : allSchemes()) {
    if (!valid.empty()) valid += ", ";
    valid += toString(s);
  }
  throw std::invalid_argument("unknown scheme '" + std::string(tag) + "' (expected one of: " + valid + ")");
}

SolveReport solveSingleRrh(const NetworkInstance& inst, const BenchmarkOptions& opts) {
  SolverOptions so = opts.solver;
  so.mode = SearchMode::singleRrh;
  SolveReport r = solve(inst, so);
  r.scheme = std::string(toString(Scheme::singleRrh));
  return r;
}

SolveReport solveEqualPower(const NetworkInstance& inst, const BenchmarkOptions& opts) {
  DualPoint dual;
  dual.mu.assign(inst.rrhs(), 0.0);
  SolveReport report;
  report.scheme = std::string(toString(Scheme::equalPower));

  auto evaluate = [&](double lambda) {
    dual.lambda = lambda;
    DualEvaluation ev = dualFunction(inst, dual, SearchMode::equalPower, opts.solver.search);
    report.counters += ev.counters;
    ++report.dualEvaluations;
    return ev;
  };
  auto usageOf = [&](const DualEvaluation& ev) { return 1.0 - subgradient(inst, dual, ev.perSc)[0]; };

  DualEvaluation hiEval = evaluate(0.0);
  double dualValue = hiEval.value;
  Allocation best;
  if (usageOf(hiEval) <= 1.0) {
    best = repairFeasibility(inst, assembleAllocation(inst, hiEval.perSc));
    report.primalSource = "lambda-zero";
    report.converged = true;
  } else {
    double lo = 0.0;
    double hi = inst.maxWeight() * *std::max_element(inst.fronthaulRates().begin(), inst.fronthaulRates().end());
    DualEvaluation loEval = hiEval;
    hiEval = evaluate(hi);
    dualValue = std::min(dualValue, hiEval.value);
    while (hi - lo > opts.bisectionTolerance * hi && report.iterations < opts.maxBisections) {
      const double mid = 0.5 * (lo + hi);
      DualEvaluation ev = evaluate(mid);
      dualValue = std::min(dualValue, ev.value);
      ++report.iterations;
      if (usageOf(ev) > 1.0) {
        lo = mid;
        loEval = std::move(ev);
      } else {
        hi = mid;
        hiEval = std::move(ev);
      }
    }
    report.converged = hi - lo <= opts.bisectionTolerance * hi;
    Allocation fromHi = repairFeasibility(inst, assembleAllocation(inst, hiEval.perSc));
    Allocation fromLo = repairFeasibility(inst, assembleAllocation(inst, loEval.perSc));
    if (weightedSumRate(inst, fromLo) > weightedSumRate(inst, fromHi)) {
      best = std::move(fromLo);
      report.primalSource = "bisection-low-repaired";
    } else {
      best = std::move(fromHi);
      report.primalSource = "bisection-high";
    }
  }
  report.wsr = weightedSumRate(inst, best);
  report.allocation = std::move(best);
  report.dualValue = dualValue;
  report.gap = report.dualValue - report.wsr;
  return report;
}

std::vector<int> nearestRrh(const NetworkInstance& inst) {
  if (!inst.hasDistances()) throw std::invalid_argument("conventional OFDMA needs user-RRH distances");
  std::vector<int> nearest(inst.users(), 0);
  for (int k = 0; k < inst.users(); ++k) {
    for (int m = 1; m < inst.rrhs(); ++m) {
      if (inst.distance(k, m) < inst.distance(k, nearest[k])) nearest[k] = m;
    }
  }
  return nearest;
}

namespace {

/// One RRH serving its own users on its own block under a fronthaul share.
class CellProblem {
 public:
  CellProblem(const NetworkInstance& inst, int rrh, std::vector<int> users, int firstSc, int lastSc, double share)
      : inst_(inst), m_(rrh), users_(std::move(users)), first_(firstSc), last_(lastSc), share_(share) {
    const int count = std::max(0, last_ - first_);
    user_.assign(count, -1);
    power_.assign(count, 0.0);
    rate_.assign(count, 0.0);
  }

  /// Water-filling powers and best user per subcarrier; returns the summed
  /// per-subcarrier Lagrangian.
  double evaluate(double lambda, double mu) {
    const double b = inst_.bandwidthPerSc();
    const double scale = b / std::numbers::ln2;
    const double sigma2 = inst_.noisePower();
    double total = 0.0;
    for (int n = first_; n < last_; ++n) {
      const int i = n - first_;
      user_[i] = -1;
      power_[i] = 0.0;
      rate_[i] = 0.0;
      double bestValue = 0.0;
      for (int k : users_) {
        const double F = inst_.weight(k) - lambda / inst_.fronthaulRate(m_);
        const double g = inst_.gain(k, m_, n);
        if (!(F > 0) || !(g > 0)) continue;
        const double p = scale * F / mu - sigma2 / g;
        if (!(p > 0)) continue;
        const double r = b * std::log1p(g * p / sigma2) / std::numbers::ln2;
        const double value = F * r - mu * p;
        if (value > bestValue) {
          bestValue = value;
          user_[i] = k;
          power_[i] = p;
          rate_[i] = r;
        }
      }
      total += bestValue;
    }
    return total;
  }

  double usage() const {
    double u = 0.0;
    for (double r : rate_) u += r;
    return u / inst_.fronthaulRate(m_);
  }

  double power() const {
    double p = 0.0;
    for (double x : power_) p += x;
    return p;
  }

  double lambdaStar(double mu, const BenchmarkOptions& opts) {
    evaluate(0.0, mu);
    if (usage() <= share_) return 0.0;
    double maxWeight = 0.0;
    for (int k : users_) maxWeight = std::max(maxWeight, inst_.weight(k));
    double lo = 0.0;
    double hi = maxWeight * inst_.fronthaulRate(m_);
    for (int i = 0; i < opts.maxBisections && hi - lo > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      evaluate(mid, mu);
      if (usage() > share_) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  /// Fills `alloc` from the last evaluation, scaled to the power budget.
  void write(Allocation& alloc) const {
    const double used = power();
    const double factor = used > inst_.maxPower(m_) ? inst_.maxPower(m_) / used : 1.0;
    for (int n = first_; n < last_; ++n) {
      const int i = n - first_;
      if (user_[i] < 0 || !(power_[i] * factor > 0)) continue;
      alloc.userOnSc[n] = user_[i];
      alloc.rrhSet[n] = RrhSet::single(m_);
      alloc.power(m_, n) = power_[i] * factor;
    }
  }

 private:
  const NetworkInstance& inst_;
  int m_;
  std::vector<int> users_;
  int first_;
  int last_;
  double share_;
  std::vector<int> user_;
  std::vector<double> power_;
  std::vector<double> rate_;
};

}  // namespace

SolveReport solveConventionalOfdma(const NetworkInstance& inst, const BenchmarkOptions& opts) {
  const int M = inst.rrhs();
  const int block = inst.subcarriers() / M;
  const double share = 1.0 / M;
  const std::vector<int> nearest = nearestRrh(inst);

  SolveReport report;
  report.scheme = std::string(toString(Scheme::conventional));
  report.primalSource = "per-rrh";
  report.converged = true;
  Allocation alloc = Allocation::empty(inst.dims());
  double dualValue = 0.0;

  for (int m = 0; m < M; ++m) {
    std::vector<int> users;
    for (int k = 0; k < inst.users(); ++k) {
      if (nearest[k] == m) users.push_back(k);
    }
    if (users.empty() || block == 0) continue;
    CellProblem cell(inst, m, users, m * block, (m + 1) * block, share);

    double maxWeight = 0.0;
    for (int k : users) maxWeight = std::max(maxWeight, inst.weight(k));
    const double muHi = std::max(maxWeight, 1e-300) * inst.dims().accessBandwidthHz / (std::numbers::ln2 * inst.maxPower(m));
    double lo = 1e-9 * muHi;
    double hi = muHi;
    double lambda = cell.lambdaStar(lo, opts);
    cell.evaluate(lambda, lo);
    if (cell.power() > inst.maxPower(m)) {
      for (int i = 0; i < opts.maxBisections && hi - lo > opts.bisectionTolerance * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        lambda = cell.lambdaStar(mid, opts);
        cell.evaluate(lambda, mid);
        if (cell.power() > inst.maxPower(m)) {
          lo = mid;
        } else {
          hi = mid;
        }
        ++report.iterations;
      }
    } else {
      hi = lo;
    }
    lambda = cell.lambdaStar(hi, opts);
    const double lagrangian = cell.evaluate(lambda, hi);
    dualValue += lagrangian + lambda * share + hi * inst.maxPower(m);
    cell.write(alloc);
  }

  alloc.timeShare = timeShares(inst, alloc);
  report.wsr = weightedSumRate(inst, alloc);
  report.allocation = std::move(alloc);
  report.dualValue = dualValue;
  report.gap = report.dualValue - report.wsr;
  return report;
}

SolveReport solveScheme(const NetworkInstance& inst, Scheme scheme, const BenchmarkOptions& opts) {
  switch (scheme) {
    case Scheme::proposedExhaustive:
    case Scheme::proposedGreedy: {
      SolverOptions so = opts.solver;
      so.mode = scheme == Scheme::proposedExhaustive ? SearchMode::exhaustive : SearchMode::greedy;
      SolveReport r = solve(inst, so);
      r.scheme = std::string(toString(scheme));
      return r;
    }
    case Scheme::singleRrh: return solveSingleRrh(inst, opts);
    case Scheme::equalPower: return solveEqualPower(inst, opts);
    case Scheme::conventional: return solveConventionalOfdma(inst, opts);
  }
  throw std::logic_error("unknown scheme");
}

}  // namespace udcran

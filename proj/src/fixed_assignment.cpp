#include "udcran/fixed_assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "udcran/ellipsoid.hpp"

namespace udcran {

namespace {

struct ActiveSc {
  int n = 0;
  int k = 0;
  double weight = 0.0;
  double inverseRates = 0.0;  // sum of 1/R_m over the selected RRHs
  std::vector<int> rrhs;
  std::vector<double> gainOverNoise;
};

class FixedProblem {
 public:
  FixedProblem(const NetworkInstance& inst, const Allocation& assignment) : inst_(inst) {
    for (int n = 0; n < assignment.subcarriers(); ++n) {
      if (!assignment.userOnSc[n] || assignment.rrhSet[n].empty()) continue;
      ActiveSc sc;
      sc.n = n;
      sc.k = *assignment.userOnSc[n];
      sc.weight = inst.weight(sc.k);
      for (int m : assignment.rrhSet[n]) {
        sc.rrhs.push_back(m);
        sc.gainOverNoise.push_back(inst.gain(sc.k, m, n) / inst.noisePower());
        sc.inverseRates += 1.0 / inst.fronthaulRate(m);
      }
      active_.push_back(std::move(sc));
    }
    powers_.resize(active_.size());
    for (std::size_t i = 0; i < active_.size(); ++i) powers_[i].assign(active_[i].rrhs.size(), 0.0);
  }

  bool empty() const { return active_.empty(); }

  /// Closed-form powers at (lambda, mu); returns fronthaul usage and
  /// accumulates the Lagrangian terms sum_n (F r - mu p).
  double evaluate(double lambda, const std::vector<double>& mu, double* lagrangian) {
    const double b = inst_.bandwidthPerSc();
    const double scale = b / std::numbers::ln2;
    double usage = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      const ActiveSc& sc = active_[i];
      auto& p = powers_[i];
      std::fill(p.begin(), p.end(), 0.0);
      const double F = sc.weight - lambda * sc.inverseRates;
      if (!(F > 0)) continue;
      double G = 0.0;
      for (std::size_t j = 0; j < sc.rrhs.size(); ++j) G += sc.gainOverNoise[j] / mu[sc.rrhs[j]];
      const double gamma = scale * F * G - 1.0;
      if (!(gamma > 0)) continue;
      double cost = 0.0;
      for (std::size_t j = 0; j < sc.rrhs.size(); ++j) {
        const double m = mu[sc.rrhs[j]];
        p[j] = sc.gainOverNoise[j] / (m * m * G * G) * gamma;
        cost += m * p[j];
      }
      const double rate = b * std::log1p(gamma) / std::numbers::ln2;
      usage += rate * sc.inverseRates;
      total += F * rate - cost;
    }
    if (lagrangian) *lagrangian = total;
    return usage;
  }

  /// Smallest lambda with fronthaul usage <= 1 for this mu.
  double lambdaStar(const std::vector<double>& mu, int bisections) {
    if (evaluate(0.0, mu, nullptr) <= 1.0) return 0.0;
    double hi = 0.0;
    for (const ActiveSc& sc : active_) hi = std::max(hi, sc.weight / sc.inverseRates);
    double lo = 0.0;
    for (int i = 0; i < bisections && hi - lo > 1e-13 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (evaluate(mid, mu, nullptr) > 1.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  void powerSums(std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < active_.size(); ++i) {
      for (std::size_t j = 0; j < active_[i].rrhs.size(); ++j) out[active_[i].rrhs[j]] += powers_[i][j];
    }
  }

  /// Allocation from the most recent evaluate(), with per-RRH budgets
  /// enforced by scaling.
  Allocation primal(const Allocation& assignment) const {
    Allocation a = Allocation::empty(inst_.dims());
    for (std::size_t i = 0; i < active_.size(); ++i) {
      const ActiveSc& sc = active_[i];
      a.userOnSc[sc.n] = sc.k;
      a.rrhSet[sc.n] = assignment.rrhSet[sc.n];
      for (std::size_t j = 0; j < sc.rrhs.size(); ++j) a.power(sc.rrhs[j], sc.n) = powers_[i][j];
    }
    for (int m = 0; m < inst_.rrhs(); ++m) {
      const double used = totalPower(a, m);
      if (used > inst_.maxPower(m)) {
        const double factor = inst_.maxPower(m) / used;
        for (int n = 0; n < a.subcarriers(); ++n) a.power(m, n) *= factor;
      }
    }
    for (int n = 0; n < a.subcarriers(); ++n) {
      for (int m : a.rrhSet[n]) {
        if (!(a.power(m, n) > 0)) a.rrhSet[n] = a.rrhSet[n].without(m);
      }
      if (a.rrhSet[n].empty()) a.userOnSc[n].reset();
    }
    return a;
  }

 private:
  const NetworkInstance& inst_;
  std::vector<ActiveSc> active_;
  std::vector<std::vector<double>> powers_;
};

}  // namespace

Allocation optimizeFixedAssignment(const NetworkInstance& inst, const Allocation& assignment,
                                   const FixedAssignmentOptions& opts) {
  const int M = inst.rrhs();
  FixedProblem problem(inst, assignment);
  Allocation best = Allocation::empty(inst.dims());
  if (problem.empty()) return best;

  const double weightScale = inst.maxWeight() > 0 ? inst.maxWeight() : 1.0;
  std::vector<double> muScale(M);
  for (int m = 0; m < M; ++m) {
    muScale[m] = weightScale * inst.dims().accessBandwidthHz / (std::numbers::ln2 * inst.maxPower(m));
  }

  double bestWsr = -1.0;
  std::vector<double> mu(M);
  std::vector<double> used(M);
  ConvexOracle oracle = [&](const Eigen::VectorXd& y, Eigen::VectorXd& g) {
    for (int m = 0; m < M; ++m) mu[m] = y[m] * muScale[m];
    const double lambda = problem.lambdaStar(mu, opts.lambdaBisections);
    double lagrangian = 0.0;
    problem.evaluate(lambda, mu, &lagrangian);
    problem.powerSums(used);
    Allocation candidate = problem.primal(assignment);
    const double wsr = weightedSumRate(inst, candidate);
    if (wsr > bestWsr) {
      bestWsr = wsr;
      best = std::move(candidate);
    }
    double value = lagrangian + lambda;
    for (int m = 0; m < M; ++m) {
      value += mu[m] * inst.maxPower(m);
      g[m] = (inst.maxPower(m) - used[m]) * muScale[m];
    }
    return value;
  };

  EllipsoidOptions eo;
  eo.maxIterations = opts.maxIterations;
  eo.relativeTolerance = opts.relativeTolerance;
  eo.lowerBound.assign(M, opts.muFloorFraction);
  ellipsoidMinimize(EllipsoidState::ball(Eigen::VectorXd::Constant(M, 0.5), std::sqrt(static_cast<double>(M))), oracle,
                    eo);

  best.timeShare = timeShares(inst, best);
  return best;
}

}  // namespace udcran

#include "udcran/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace udcran {

namespace {

void require(bool condition, const std::string& what) {
  if (!condition) throw std::invalid_argument(what);
}

}  // namespace

void SystemDims::validate() const {
  require(rrhs >= 1, "M must be at least 1");
  require(rrhs <= kMaxRrhs, "M must not exceed " + std::to_string(kMaxRrhs));
  require(users >= 1, "K must be at least 1");
  require(subcarriers >= 1, "N must be at least 1");
  require(accessBandwidthHz > 0, "access bandwidth B must be positive");
  require(fronthaulBandwidthHz > 0, "fronthaul bandwidth W must be positive");
}

NetworkInstance::NetworkInstance(SystemDims dims, std::vector<double> gains,
                                 std::vector<double> fronthaulRates, double noisePower,
                                 std::vector<double> maxPower, std::vector<double> weights,
                                 std::vector<double> distances, std::optional<InstanceSeeds> seeds)
    : dims_(dims),
      gains_(std::move(gains)),
      fronthaulRates_(std::move(fronthaulRates)),
      noisePower_(noisePower),
      maxPower_(std::move(maxPower)),
      weights_(std::move(weights)),
      distances_(std::move(distances)),
      seeds_(seeds) {
  dims_.validate();
  const auto M = static_cast<std::size_t>(dims_.rrhs);
  const auto K = static_cast<std::size_t>(dims_.users);
  const auto N = static_cast<std::size_t>(dims_.subcarriers);
  require(gains_.size() == K * M * N, "gain tensor must have K*M*N entries");
  require(fronthaulRates_.size() == M, "need one fronthaul rate per RRH");
  require(maxPower_.size() == M, "need one power budget per RRH");
  require(weights_.size() == K, "need one weight per user");
  require(distances_.empty() || distances_.size() == K * M, "distance matrix must be K x M");
  for (double g : gains_) require(std::isfinite(g) && g >= 0, "channel gains must be finite and >= 0");
  for (double r : fronthaulRates_) require(std::isfinite(r) && r > 0, "fronthaul rates must be > 0");
  for (double p : maxPower_) require(std::isfinite(p) && p > 0, "power budgets must be > 0");
  for (double w : weights_) require(std::isfinite(w) && w >= 0, "user weights must be >= 0");
  require(std::isfinite(noisePower_) && noisePower_ > 0, "noise power must be > 0");

  amplitudes_.resize(gains_.size());
  std::transform(gains_.begin(), gains_.end(), amplitudes_.begin(), [](double g) { return std::sqrt(g); });
}

double NetworkInstance::maxWeight() const { return *std::max_element(weights_.begin(), weights_.end()); }

Allocation Allocation::empty(const SystemDims& dims) {
  Allocation a;
  a.rrhs = dims.rrhs;
  a.userOnSc.assign(dims.subcarriers, std::nullopt);
  a.rrhSet.assign(dims.subcarriers, RrhSet{});
  a.powers.assign(static_cast<std::size_t>(dims.subcarriers) * dims.rrhs, 0.0);
  a.timeShare.assign(dims.rrhs, 0.0);
  return a;
}

void Allocation::checkWellFormed() const {
  const int N = subcarriers();
  if (rrhSet.size() != userOnSc.size() || powers.size() != static_cast<std::size_t>(N) * rrhs ||
      timeShare.size() != static_cast<std::size_t>(rrhs)) {
    throw std::logic_error("allocation has inconsistent dimensions");
  }
  for (int n = 0; n < N; ++n) {
    if (!rrhSet[n].empty() && !userOnSc[n]) throw std::logic_error("RRHs selected on an unassigned subcarrier");
    for (int m = 0; m < rrhs; ++m) {
      const double p = power(m, n);
      if (p < 0) throw std::logic_error("negative power");
      if (p > 0 && !rrhSet[n].contains(m)) throw std::logic_error("power on an unselected RRH");
    }
  }
}

void DualPoint::validate() const {
  if (!(lambda >= 0)) throw std::domain_error("lambda must be >= 0");
  for (double m : mu) {
    if (!(m >= 0)) throw std::domain_error("mu must be >= 0");
  }
}

double snr(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> power) {
  double amplitudeSum = 0.0;
  for (int m : set) {
    const double p = power[m];
    if (p < 0) throw std::domain_error("negative transmit power");
    amplitudeSum += inst.amplitude(k, m, n) * std::sqrt(p);
  }
  return amplitudeSum * amplitudeSum / inst.noisePower();
}

double scRate(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> power) {
  return inst.bandwidthPerSc() * std::log1p(snr(inst, n, k, set, power)) / std::numbers::ln2;
}

double allocatedScRate(const NetworkInstance& inst, const Allocation& alloc, int n) {
  const auto& user = alloc.userOnSc[n];
  if (!user || alloc.rrhSet[n].empty()) return 0.0;
  return scRate(inst, n, *user, alloc.rrhSet[n], alloc.scPowers(n));
}

double weightedSumRate(const NetworkInstance& inst, const Allocation& alloc) {
  double total = 0.0;
  for (int n = 0; n < alloc.subcarriers(); ++n) {
    if (alloc.userOnSc[n]) total += inst.weight(*alloc.userOnSc[n]) * allocatedScRate(inst, alloc, n);
  }
  return total;
}

double sumRate(const NetworkInstance& inst, const Allocation& alloc) {
  double total = 0.0;
  for (int n = 0; n < alloc.subcarriers(); ++n) total += allocatedScRate(inst, alloc, n);
  return total;
}

double fronthaulUsage(const NetworkInstance& inst, const Allocation& alloc) {
  double usage = 0.0;
  for (int n = 0; n < alloc.subcarriers(); ++n) {
    const double rate = allocatedScRate(inst, alloc, n);
    if (rate == 0.0) continue;
    for (int m : alloc.rrhSet[n]) usage += rate / inst.fronthaulRate(m);
  }
  return usage;
}

std::vector<double> timeShares(const NetworkInstance& inst, const Allocation& alloc) {
  std::vector<double> shares(inst.rrhs(), 0.0);
  double usage = 0.0;
  for (int n = 0; n < alloc.subcarriers(); ++n) {
    const double rate = allocatedScRate(inst, alloc, n);
    if (rate == 0.0) continue;
    for (int m : alloc.rrhSet[n]) {
      const double share = rate / inst.fronthaulRate(m);
      shares[m] += share;
      usage += share;
    }
  }
  if (usage > 1.0 + kFeasibilityTol) {
    throw InfeasibleAllocation("fronthaul usage " + std::to_string(usage) + " exceeds 1; repair needed");
  }
  return shares;
}

double totalPower(const Allocation& alloc, int m) {
  double total = 0.0;
  for (int n = 0; n < alloc.subcarriers(); ++n) total += alloc.power(m, n);
  return total;
}

bool isFeasible(const NetworkInstance& inst, const Allocation& alloc) {
  if (fronthaulUsage(inst, alloc) > 1.0 + kFeasibilityTol) return false;
  for (int m = 0; m < inst.rrhs(); ++m) {
    if (totalPower(alloc, m) > inst.maxPower(m) * (1.0 + kFeasibilityTol)) return false;
  }
  double shareSum = 0.0;
  for (double t : alloc.timeShare) shareSum += t;
  return shareSum <= 1.0 + kFeasibilityTol;
}

double setF(const NetworkInstance& inst, int /*n*/, int k, RrhSet set, double lambda) {
  double inverseRates = 0.0;
  for (int m : set) inverseRates += 1.0 / inst.fronthaulRate(m);
  return inst.weight(k) - lambda * inverseRates;
}

double setG(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> mu) {
  double g = 0.0;
  for (int m : set) g += inst.gain(k, m, n) / (inst.noisePower() * flooredMu(mu[m]));
  return g;
}

double snrScale(const NetworkInstance& inst) { return inst.bandwidthPerSc() / std::numbers::ln2; }

double optSnrSet(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual) {
  return snrScale(inst) * setF(inst, n, k, set, dual.lambda) * setG(inst, n, k, set, dual.mu) - 1.0;
}

double objectiveFromFG(double F, double G, double ratePerSc) {
  const double gamma = ratePerSc / std::numbers::ln2 * F * G - 1.0;
  if (!(gamma > 0.0)) return 0.0;
  return ratePerSc * F * std::log1p(gamma) / std::numbers::ln2 - gamma / G;
}

double setObjective(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual) {
  if (set.empty()) return 0.0;
  return objectiveFromFG(setF(inst, n, k, set, dual.lambda), setG(inst, n, k, set, dual.mu),
                         inst.bandwidthPerSc());
}

}  // namespace udcran

#include "udcran/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "udcran/channel.hpp"

namespace udcran::oracle {

namespace {

using Vec = std::vector<double>;

constexpr double kInfiniteSlope = 1e12;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct SpgProblem {
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&)> gradient;
  std::function<void(Vec&)> project;
  /// Scale the gradient by diag(x) (affine scaling). Only valid when the
  /// feasible set is the nonnegative orthant, where clipping is the
  /// projection in every diagonal metric.
  bool affineScaling = false;
};

/// Nonmonotone spectral projected gradient ascent. Returns the final value.
double spgMaximize(const SpgProblem& prob, Vec& x, const SpgOptions& opts) {
  const std::size_t n = x.size();
  prob.project(x);
  double f = prob.value(x);
  Vec g(n), gNew(n), trial(n), d(n), xNew(n), D(n, 1.0);
  prob.gradient(x, g);
  std::deque<double> history{f};
  double alpha = 1.0;

  auto updateScaling = [&] {
    if (!prob.affineScaling) return;
    double top = 0.0;
    for (double v : x) top = std::max(top, v);
    const double floor = 1e-15 * std::max(1.0, top);
    for (std::size_t i = 0; i < n; ++i) D[i] = std::max(x[i], floor);
  };
  updateScaling();

  for (int it = 0; it < opts.maxIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + D[i] * g[i];
    prob.project(trial);
    double pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) pg = std::max(pg, std::abs(trial[i] - x[i]));
    if (pg <= opts.gradientTolerance) break;

    for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * D[i] * g[i];
    prob.project(trial);
    for (std::size_t i = 0; i < n; ++i) d[i] = trial[i] - x[i];
    const double slope = dot(g, d);
    const double reference = *std::max_element(history.begin(), history.end());

    double step = 1.0;
    double fNew = f;
    bool accepted = false;
    while (step > 1e-30) {
      for (std::size_t i = 0; i < n; ++i) xNew[i] = x[i] + step * d[i];
      fNew = prob.value(xNew);
      if (fNew >= reference + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    prob.gradient(xNew, gNew);
    // Spectral step in the metric of the current scaling.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = xNew[i] - x[i];
      ss += s * s / D[i];
      sy += s * (gNew[i] - g[i]);
    }
    alpha = sy < 0 ? std::clamp(-ss / sy, 1e-12, 1e12) : 1e12;
    x.swap(xNew);
    g.swap(gNew);
    f = fNew;
    updateScaling();
    history.push_back(f);
    if (history.size() > 10) history.pop_front();
  }
  return f;
}

/// Projection onto {x >= 0, sum x <= 1} over the listed coordinates.
void projectCappedSimplex(Vec& x, const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  for (std::size_t i : idx) {
    x[i] = std::max(0.0, x[i]);
    sum += x[i];
  }
  if (sum <= 1.0) return;
  // Euclidean projection of the original point onto the simplex; the clipped
  // point has the same projection.
  Vec v;
  v.reserve(idx.size());
  for (std::size_t i : idx) v.push_back(x[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    cumulative += v[r];
    const double t = (cumulative - 1.0) / static_cast<double>(r + 1);
    if (v[r] - t > 0) theta = t;
  }
  for (std::size_t i : idx) x[i] = std::max(0.0, x[i] - theta);
}

double localRate(const NetworkInstance& inst, int n, int k, RrhSet set, const Vec& power) {
  double amplitude = 0.0;
  for (int m : set) amplitude += std::sqrt(inst.gain(k, m, n)) * std::sqrt(std::max(0.0, power[m]));
  return inst.bandwidthPerSc() * std::log2(1.0 + amplitude * amplitude / inst.noisePower());
}

double inverseRates(const NetworkInstance& inst, RrhSet set) {
  double c = 0.0;
  for (int m : set) c += 1.0 / inst.fronthaulRate(m);
  return c;
}

/// d/dq of ln(1 + (sum beta sqrt q)^2) for one coordinate.
double logRateSlope(double A, double beta, double q, double gamma) {
  if (q > 0) return A * beta / ((1.0 + gamma) * std::sqrt(q));
  if (A > 0) return beta > 0 ? kInfiniteSlope : 0.0;
  return beta * beta / (1.0 + gamma);
}

}  // namespace

double assignmentCount(const TinyInstanceSpec& spec) {
  const double options = spec.users * (std::pow(2.0, spec.rrhs) - 1.0);
  return std::pow(options, spec.subcarriers);
}

TinyInstanceSpec randomTinySpec(std::uint64_t seed) {
  static const std::vector<TinyInstanceSpec> shapes{{1, 3, 6}, {2, 2, 4}, {2, 3, 4}, {3, 3, 3}, {3, 2, 3},
                                                     {2, 2, 5}, {2, 1, 6}, {3, 1, 3}, {1, 2, 6}};
  std::mt19937_64 rng(seed);
  return shapes[rng() % shapes.size()];
}

NetworkInstance tinyInstance(const TinyInstanceSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  ScenarioConfig cfg;
  cfg.dims.rrhs = spec.rrhs;
  cfg.dims.users = spec.users;
  cfg.dims.subcarriers = spec.subcarriers;
  std::uniform_real_distribution<double> logW(std::log(5e6), std::log(200e6));
  cfg.fronthaul.bandwidthHz = std::exp(logW(rng));
  cfg.layout.layoutSeed = rng();
  cfg.layout.fadingSeed = rng();
  return generateInstance(cfg);
}

double fixedSelectionObjective(const NetworkInstance& inst, int n, int k, RrhSet set, const Vec& power,
                               double lambda, const Vec& mu) {
  double cost = 0.0;
  for (int m : set) cost += mu[m] * power[m];
  const double F = inst.weight(k) - lambda * inverseRates(inst, set);
  return F * localRate(inst, n, k, set, power) - cost;
}

Vec concaveFixedSelectionMax(const NetworkInstance& inst, int n, int k, RrhSet set, double lambda, const Vec& mu,
                             const SpgOptions& opts) {
  const double F = inst.weight(k) - lambda * inverseRates(inst, set);
  if (!(F > 0)) throw std::invalid_argument("concaveFixedSelectionMax needs w_k - lambda sum 1/R_m > 0");
  Vec power(inst.rrhs(), 0.0);
  if (set.empty()) return power;

  const double c = inst.bandwidthPerSc() / std::numbers::ln2;
  std::vector<int> rrhs(set.begin(), set.end());
  const std::size_t d = rrhs.size();
  // q_j = p_j mu_j / (F c); objective / (F c) = ln(1 + (sum beta_j sqrt q_j)^2) - sum q_j.
  Vec beta(d);
  for (std::size_t j = 0; j < d; ++j) {
    const int m = rrhs[j];
    if (!(mu[m] > 0)) throw std::invalid_argument("concaveFixedSelectionMax needs mu_m > 0 on the selected RRHs");
    beta[j] = std::sqrt(inst.gain(k, m, n) * F * c / (mu[m] * inst.noisePower()));
  }
  auto amplitude = [&](const Vec& q) {
    double A = 0.0;
    for (std::size_t j = 0; j < d; ++j) A += beta[j] * std::sqrt(std::max(0.0, q[j]));
    return A;
  };
  SpgProblem prob;
  prob.value = [&](const Vec& q) {
    const double A = amplitude(q);
    double total = std::log1p(A * A);
    for (double x : q) total -= x;
    return total;
  };
  prob.gradient = [&](const Vec& q, Vec& g) {
    const double A = amplitude(q);
    const double gamma = A * A;
    for (std::size_t j = 0; j < d; ++j) g[j] = logRateSlope(A, beta[j], q[j], gamma) - 1.0;
  };
  prob.project = [](Vec& q) {
    for (double& x : q) x = std::max(0.0, x);
  };
  prob.affineScaling = true;
  Vec q(d, 1.0 / static_cast<double>(d));
  spgMaximize(prob, q, opts);
  for (std::size_t j = 0; j < d; ++j) power[rrhs[j]] = q[j] * F * c / mu[rrhs[j]];
  return power;
}

ScBruteForce bruteForceSubproblem(const NetworkInstance& inst, int n, double lambda, const Vec& mu, bool singleOnly) {
  ScBruteForce best;
  best.power.assign(inst.rrhs(), 0.0);
  const std::uint64_t subsets = std::uint64_t{1} << inst.rrhs();
  for (int k = 0; k < inst.users(); ++k) {
    for (std::uint64_t bits = 1; bits < subsets; ++bits) {
      const RrhSet set(bits);
      if (singleOnly && set.size() != 1) continue;
      if (!(inst.weight(k) - lambda * inverseRates(inst, set) > 0)) continue;
      Vec p = concaveFixedSelectionMax(inst, n, k, set, lambda, mu);
      const double value = fixedSelectionObjective(inst, n, k, set, p, lambda, mu);
      if (value > best.value) {
        best.value = value;
        best.user = k;
        best.set = set;
        best.power = std::move(p);
      }
    }
  }
  return best;
}

ScBruteForce bruteForceEqualPower(const NetworkInstance& inst, int n, int k, double lambda, const Vec& mu,
                                  bool chargePowerCost) {
  ScBruteForce best;
  best.power.assign(inst.rrhs(), 0.0);
  const std::uint64_t subsets = std::uint64_t{1} << inst.rrhs();
  for (std::uint64_t bits = 1; bits < subsets; ++bits) {
    const RrhSet set(bits);
    Vec p(inst.rrhs(), 0.0);
    for (int m : set) p[m] = inst.maxPower(m) / inst.subcarriers();
    const double F = inst.weight(k) - lambda * inverseRates(inst, set);
    double value = F * localRate(inst, n, k, set, p);
    if (chargePowerCost) {
      for (int m : set) value -= mu[m] * p[m];
    }
    if (value > best.value) {
      best.value = value;
      best.user = k;
      best.set = set;
      best.power = p;
    }
  }
  return best;
}

namespace {

struct ActiveSc {
  int n;
  int k;
  RrhSet set;
  double inverseRates;
  double weight;
};

/// Maximises sum_n [w - lambda c_n]^+ r_n(p_n) over the per-RRH budgets.
/// `q` holds p / Pbar in (sc, rrh-in-set) order and is used as a warm start.
class FixedAssignmentInner {
 public:
  FixedAssignmentInner(const NetworkInstance& inst, const Allocation& assignment) : inst_(inst) {
    for (int n = 0; n < assignment.subcarriers(); ++n) {
      if (!assignment.userOnSc[n] || assignment.rrhSet[n].empty()) continue;
      const int k = *assignment.userOnSc[n];
      active_.push_back({n, k, assignment.rrhSet[n], inverseRates(inst, assignment.rrhSet[n]), inst.weight(k)});
    }
    perRrh_.resize(inst.rrhs());
    for (std::size_t s = 0; s < active_.size(); ++s) {
      for (int m : active_[s].set) {
        perRrh_[m].push_back(coords_.size());
        coords_.push_back({s, m});
      }
    }
    beta_.resize(coords_.size());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const auto [s, m] = coords_[i];
      beta_[i] = std::sqrt(inst.gain(active_[s].k, m, active_[s].n) * inst.maxPower(m) / inst.noisePower());
    }
    q_.assign(coords_.size(), 0.0);
    for (const auto& list : perRrh_) {
      for (std::size_t i : list) q_[i] = 1.0 / static_cast<double>(list.size());
    }
    weightScale_ = std::max(inst.maxWeight(), 1e-300);
  }

  bool empty() const { return active_.empty(); }
  double maxLambda() const {
    double hi = 0.0;
    for (const auto& sc : active_) hi = std::max(hi, sc.weight / sc.inverseRates);
    return hi;
  }

  /// Solves at lambda; returns the maximised sum in bit/s-weighted units.
  double solve(double lambda) {
    std::vector<double> factor(active_.size());
    for (std::size_t s = 0; s < active_.size(); ++s) {
      factor[s] = std::max(0.0, active_[s].weight - lambda * active_[s].inverseRates) / weightScale_;
    }
    auto amplitudes = [&](const Vec& q, Vec& A) {
      std::fill(A.begin(), A.end(), 0.0);
      for (std::size_t i = 0; i < coords_.size(); ++i) A[coords_[i].first] += beta_[i] * std::sqrt(std::max(0.0, q[i]));
    };
    Vec A(active_.size());
    SpgProblem prob;
    prob.value = [&](const Vec& q) {
      amplitudes(q, A);
      double total = 0.0;
      for (std::size_t s = 0; s < active_.size(); ++s) total += factor[s] * std::log1p(A[s] * A[s]);
      return total;
    };
    prob.gradient = [&](const Vec& q, Vec& g) {
      amplitudes(q, A);
      for (std::size_t i = 0; i < coords_.size(); ++i) {
        const std::size_t s = coords_[i].first;
        g[i] = factor[s] > 0 ? factor[s] * logRateSlope(A[s], beta_[i], q[i], A[s] * A[s]) : 0.0;
      }
    };
    prob.project = [&](Vec& q) {
      for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (factor[coords_[i].first] <= 0) q[i] = 0.0;
      }
      for (const auto& list : perRrh_) projectCappedSimplex(q, list);
    };
    // Restart inactive subcarriers from an even share so they can re-enter.
    for (const auto& list : perRrh_) {
      for (std::size_t i : list) {
        if (q_[i] <= 0 && factor[coords_[i].first] > 0) q_[i] = 1.0 / static_cast<double>(list.size());
      }
    }
    SpgOptions opts;
    opts.gradientTolerance = 1e-12;
    const double value = spgMaximize(prob, q_, opts);
    return value * weightScale_ * inst_.bandwidthPerSc() / std::numbers::ln2;
  }

  Allocation allocation() const {
    Allocation a = Allocation::empty(inst_.dims());
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const auto [s, m] = coords_[i];
      const ActiveSc& sc = active_[s];
      a.userOnSc[sc.n] = sc.k;
      a.rrhSet[sc.n] = sc.set;
      a.power(m, sc.n) = q_[i] * inst_.maxPower(m);
    }
    return a;
  }

  double usage(const Allocation& a) const {
    double u = 0.0;
    for (const auto& sc : active_) u += localRate(inst_, sc.n, sc.k, sc.set, scVector(a, sc.n)) * sc.inverseRates;
    return u;
  }

  Vec scVector(const Allocation& a, int n) const {
    Vec p(inst_.rrhs());
    for (int m = 0; m < inst_.rrhs(); ++m) p[m] = a.power(m, n);
    return p;
  }

  const std::vector<ActiveSc>& active() const { return active_; }

 private:
  const NetworkInstance& inst_;
  std::vector<ActiveSc> active_;
  std::vector<std::pair<std::size_t, int>> coords_;
  std::vector<std::vector<std::size_t>> perRrh_;
  Vec beta_;
  Vec q_;
  double weightScale_ = 1.0;
};

void dropIdle(const NetworkInstance& inst, Allocation& a) {
  for (int n = 0; n < a.subcarriers(); ++n) {
    for (int m : a.rrhSet[n]) {
      if (!(a.power(m, n) > 0)) {
        a.power(m, n) = 0.0;
        a.rrhSet[n] = a.rrhSet[n].without(m);
      }
    }
    if (a.rrhSet[n].empty()) a.userOnSc[n].reset();
  }
  a.timeShare.assign(inst.rrhs(), 0.0);
  for (int n = 0; n < a.subcarriers(); ++n) {
    if (!a.userOnSc[n]) continue;
    Vec p(inst.rrhs());
    for (int m = 0; m < inst.rrhs(); ++m) p[m] = a.power(m, n);
    const double r = localRate(inst, n, *a.userOnSc[n], a.rrhSet[n], p);
    for (int m : a.rrhSet[n]) a.timeShare[m] += r / inst.fronthaulRate(m);
  }
}

double localWsr(const NetworkInstance& inst, const Allocation& a) {
  double total = 0.0;
  for (int n = 0; n < a.subcarriers(); ++n) {
    if (!a.userOnSc[n]) continue;
    Vec p(inst.rrhs());
    for (int m = 0; m < inst.rrhs(); ++m) p[m] = a.power(m, n);
    total += inst.weight(*a.userOnSc[n]) * localRate(inst, n, *a.userOnSc[n], a.rrhSet[n], p);
  }
  return total;
}

}  // namespace

Allocation fixedAssignmentOptimum(const NetworkInstance& inst, const Allocation& assignment, double* dualBound) {
  FixedAssignmentInner inner(inst, assignment);
  if (inner.empty()) {
    if (dualBound) *dualBound = 0.0;
    return Allocation::empty(inst.dims());
  }
  const double atZero = inner.solve(0.0);
  Allocation lowAlloc = inner.allocation();
  double lowUsage = inner.usage(lowAlloc);
  if (lowUsage <= 1.0) {
    if (dualBound) *dualBound = atZero;
    dropIdle(inst, lowAlloc);
    return lowAlloc;
  }

  double lo = 0.0;
  double hi = inner.maxLambda();
  double hiValue = inner.solve(hi);
  Allocation highAlloc = inner.allocation();
  double highUsage = inner.usage(highAlloc);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = inner.solve(mid);
    Allocation a = inner.allocation();
    const double u = inner.usage(a);
    if (u > 1.0) {
      lo = mid;
      lowAlloc = std::move(a);
      lowUsage = u;
    } else {
      hi = mid;
      hiValue = value;
      highAlloc = std::move(a);
      highUsage = u;
    }
  }
  if (dualBound) *dualBound = hiValue + hi;

  // Mix the two sides so that the target rates use the fronthaul exactly,
  // then lower each subcarrier's powers until it delivers its target rate.
  const double theta = lowUsage - highUsage > 0 ? std::clamp((1.0 - highUsage) / (lowUsage - highUsage), 0.0, 1.0) : 0.0;
  Allocation mixed = Allocation::empty(inst.dims());
  for (const ActiveSc& sc : inner.active()) {
    const Vec pLo = inner.scVector(lowAlloc, sc.n);
    const Vec pHi = inner.scVector(highAlloc, sc.n);
    const double target = theta * localRate(inst, sc.n, sc.k, sc.set, pLo) +
                          (1.0 - theta) * localRate(inst, sc.n, sc.k, sc.set, pHi);
    Vec p(inst.rrhs(), 0.0);
    for (int m : sc.set) p[m] = theta * pLo[m] + (1.0 - theta) * pHi[m];
    double amplitude = 0.0;
    for (int m : sc.set) amplitude += std::sqrt(inst.gain(sc.k, m, sc.n) * p[m]);
    const double gamma = amplitude * amplitude / inst.noisePower();
    const double needed = std::exp2(target / inst.bandwidthPerSc()) - 1.0;
    const double scale = gamma > 0 ? std::min(1.0, needed / gamma) : 0.0;
    mixed.userOnSc[sc.n] = sc.k;
    mixed.rrhSet[sc.n] = sc.set;
    for (int m : sc.set) mixed.power(m, sc.n) = p[m] * scale;
  }
  dropIdle(inst, mixed);
  return mixed;
}

BruteForceResult bruteForceWsr(const NetworkInstance& inst) {
  const int M = inst.rrhs();
  const int K = inst.users();
  const int N = inst.subcarriers();
  const TinyInstanceSpec spec{M, K, N};
  if (assignmentCount(spec) > kMaxAssignments) {
    throw std::invalid_argument("instance too large for brute-force enumeration");
  }
  struct Option {
    int k;
    RrhSet set;
  };
  std::vector<Option> options;
  for (int k = 0; k < K; ++k) {
    for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << M); ++bits) options.push_back({k, RrhSet(bits)});
  }
  const std::size_t O = options.size();

  // Lagrangian bound tables h[point][n][option] on a coordinate search of the
  // dual function. Any (lambda, mu) >= 0 bounds every assignment.
  struct Point {
    double lambda;
    Vec mu;
    double constant;  // lambda + sum mu Pbar
    Vec h;            // N x O
  };
  std::vector<Point> points;
  auto evaluatePoint = [&](double lambda, const Vec& mu) {
    Point pt{lambda, mu, lambda, Vec(static_cast<std::size_t>(N) * O, 0.0)};
    for (int m = 0; m < M; ++m) pt.constant += mu[m] * inst.maxPower(m);
    double best = pt.constant;
    for (int n = 0; n < N; ++n) {
      double scBest = 0.0;
      for (std::size_t o = 0; o < O; ++o) {
        const Option& opt = options[o];
        if (!(inst.weight(opt.k) - lambda * inverseRates(inst, opt.set) > 0)) continue;
        const Vec p = concaveFixedSelectionMax(inst, n, opt.k, opt.set, lambda, mu);
        const double v = std::max(0.0, fixedSelectionObjective(inst, n, opt.k, opt.set, p, lambda, mu));
        pt.h[static_cast<std::size_t>(n) * O + o] = v;
        scBest = std::max(scBest, v);
      }
      best += scBest;
    }
    points.push_back(std::move(pt));
    return best;
  };

  const double omega = std::max(inst.maxWeight(), 1e-300);
  Vec upper(M + 1);
  upper[0] = omega * *std::max_element(inst.fronthaulRates().begin(), inst.fronthaulRates().end());
  for (int m = 0; m < M; ++m) upper[m + 1] = omega * inst.dims().accessBandwidthHz / (std::numbers::ln2 * inst.maxPower(m));
  Vec x(M + 1);
  for (int i = 0; i <= M; ++i) x[i] = 0.1 * upper[i];
  auto dualAt = [&](const Vec& y) {
    Vec mu(y.begin() + 1, y.end());
    return evaluatePoint(y[0], mu);
  };
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int cycle = 0; cycle < 3; ++cycle) {
    for (int i = 0; i <= M; ++i) {
      double a = i == 0 ? 0.0 : 1e-6 * upper[i];
      double b = upper[i];
      Vec y = x;
      double c1 = b - golden * (b - a);
      double c2 = a + golden * (b - a);
      y[i] = c1;
      double f1 = dualAt(y);
      y[i] = c2;
      double f2 = dualAt(y);
      for (int it = 0; it < 14; ++it) {
        if (f1 < f2) {
          b = c2;
          c2 = c1;
          f2 = f1;
          c1 = b - golden * (b - a);
          y[i] = c1;
          f1 = dualAt(y);
        } else {
          a = c1;
          c1 = c2;
          f1 = f2;
          c2 = a + golden * (b - a);
          y[i] = c2;
          f2 = dualAt(y);
        }
      }
      x[i] = f1 < f2 ? c1 : c2;
    }
  }

  // Bound every assignment, then solve them in decreasing bound order.
  const std::uint64_t total = static_cast<std::uint64_t>(std::llround(assignmentCount(spec)));
  std::vector<std::pair<double, std::uint64_t>> order;
  order.reserve(total);
  std::vector<std::size_t> digits(N);
  for (std::uint64_t a = 0; a < total; ++a) {
    std::uint64_t rest = a;
    for (int n = 0; n < N; ++n) {
      digits[n] = rest % O;
      rest /= O;
    }
    double bound = std::numeric_limits<double>::infinity();
    for (const Point& pt : points) {
      double v = pt.constant;
      for (int n = 0; n < N; ++n) v += pt.h[static_cast<std::size_t>(n) * O + digits[n]];
      bound = std::min(bound, v);
    }
    order.emplace_back(bound, a);
  }
  std::sort(order.begin(), order.end(), [](const auto& l, const auto& r) {
    return l.first != r.first ? l.first > r.first : l.second < r.second;
  });

  BruteForceResult result;
  result.assignments = total;
  result.allocation = Allocation::empty(inst.dims());
  for (const auto& [bound, a] : order) {
    if (bound < result.wsr * (1.0 - 1e-8)) break;
    Allocation assignment = Allocation::empty(inst.dims());
    std::uint64_t rest = a;
    for (int n = 0; n < N; ++n) {
      const Option& opt = options[rest % O];
      rest /= O;
      assignment.userOnSc[n] = opt.k;
      assignment.rrhSet[n] = opt.set;
    }
    double dual = 0.0;
    Allocation alloc = fixedAssignmentOptimum(inst, assignment, &dual);
    ++result.evaluated;
    const double wsr = localWsr(inst, alloc);
    if (wsr > result.wsr) {
      result.wsr = wsr;
      result.allocation = std::move(alloc);
      result.assignmentDualBound = dual;
    }
  }
  return result;
}

double gridWsr(const NetworkInstance& inst, int levels) {
  const int M = inst.rrhs();
  const int N = inst.subcarriers();
  const int K = inst.users();
  if (N > 2 || M > 2) throw std::invalid_argument("grid search is limited to N <= 2 and M <= 2");
  if (levels < 2) throw std::invalid_argument("grid needs at least two levels");
  const int cells = M * N;
  std::uint64_t powerCombos = 1;
  for (int i = 0; i < cells; ++i) powerCombos *= static_cast<std::uint64_t>(levels);
  std::uint64_t userCombos = 1;
  for (int n = 0; n < N; ++n) userCombos *= static_cast<std::uint64_t>(K);

  double best = 0.0;
  Vec p(static_cast<std::size_t>(cells));
  for (std::uint64_t pc = 0; pc < powerCombos; ++pc) {
    std::uint64_t rest = pc;
    for (int i = 0; i < cells; ++i) {
      const int m = i % M;
      p[i] = inst.maxPower(m) * static_cast<double>(rest % levels) / (levels - 1);
      rest /= levels;
    }
    bool withinBudget = true;
    for (int m = 0; m < M && withinBudget; ++m) {
      double used = 0.0;
      for (int n = 0; n < N; ++n) used += p[n * M + m];
      withinBudget = used <= inst.maxPower(m) * (1.0 + 1e-12);
    }
    if (!withinBudget) continue;
    for (std::uint64_t uc = 0; uc < userCombos; ++uc) {
      std::uint64_t ur = uc;
      // Fractional knapsack: rates may be delivered below capacity.
      std::vector<std::pair<double, std::pair<double, double>>> items;  // (weight/cost, (rate, cost))
      double free = 0.0;
      for (int n = 0; n < N; ++n) {
        const int k = static_cast<int>(ur % K);
        ur /= K;
        RrhSet set;
        Vec pn(M, 0.0);
        for (int m = 0; m < M; ++m) {
          pn[m] = p[n * M + m];
          if (pn[m] > 0) set = set.with(m);
        }
        if (set.empty()) continue;
        const double r = localRate(inst, n, k, set, pn);
        const double c = inverseRates(inst, set);
        items.push_back({inst.weight(k) / c, {inst.weight(k) * r, c * r}});
      }
      std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      double budget = 1.0;
      for (const auto& [ratio, item] : items) {
        const auto [value, cost] = item;
        if (cost <= budget) {
          free += value;
          budget -= cost;
        } else {
          free += value * budget / cost;
          break;
        }
      }
      best = std::max(best, free);
    }
  }
  return best;
}

SubmodularityReport submodularityCheck(const NetworkInstance& inst, int n, int k, double lambda, const Vec& mu,
                                       double tol) {
  const int M = inst.rrhs();
  if (M > 8) throw std::invalid_argument("submodularity check is limited to M <= 8");
  for (int m = 0; m < M; ++m) {
    if (!(mu[m] > 0)) throw std::invalid_argument("submodularity check needs mu_m > 0");
  }
  const double s = inst.bandwidthPerSc() / std::numbers::ln2;
  Vec g(M);
  Vec invR(M);
  for (int m = 0; m < M; ++m) {
    g[m] = inst.gain(k, m, n) / (inst.noisePower() * mu[m]);
    invR[m] = 1.0 / inst.fronthaulRate(m);
  }
  auto F = [&](std::uint64_t bits) {
    double c = 0.0;
    for (int m = 0; m < M; ++m) {
      if ((bits >> m) & 1U) c += invR[m];
    }
    return inst.weight(k) - lambda * c;
  };
  auto G = [&](std::uint64_t bits) {
    double t = 0.0;
    for (int m = 0; m < M; ++m) {
      if ((bits >> m) & 1U) t += g[m];
    }
    return t;
  };
  auto gamma = [&](std::uint64_t bits) { return s * F(bits) * G(bits) - 1.0; };

  SubmodularityReport rep;
  const std::uint64_t all = std::uint64_t{1} << M;
  for (std::uint64_t S = 0; S < all; ++S) {
    for (int i = 0; i < M; ++i) {
      if ((S >> i) & 1U) continue;
      const std::uint64_t Si = S | (std::uint64_t{1} << i);

      // Increment of F*G against the closed form.
      const double direct = F(Si) * G(Si) - F(S) * G(S);
      const double closed = g[i] * F(S) - lambda * invR[i] * G(S) - lambda * g[i] * invR[i];
      const double idScale = std::max({1.0, std::abs(F(Si) * G(Si)), std::abs(F(S) * G(S))});
      const double idErr = std::abs(direct - closed) / idScale;
      ++rep.identityChecks;
      rep.worstIdentityError = std::max(rep.worstIdentityError, idErr);
      if (idErr > tol) ++rep.identityMismatches;

      for (int j = 0; j < M; ++j) {
        if (j == i || ((S >> j) & 1U)) continue;
        const std::uint64_t Sj = S | (std::uint64_t{1} << j);
        const std::uint64_t Sij = Si | (std::uint64_t{1} << j);
        const double lhs = gamma(Si) - gamma(S);
        const double rhs = gamma(Sij) - gamma(Sj);
        const double scale = std::max({1.0, std::abs(gamma(Si)), std::abs(gamma(S)), std::abs(gamma(Sij)),
                                       std::abs(gamma(Sj))});
        const double margin = (lhs - rhs) / scale;
        ++rep.triplesChecked;
        if (margin < -tol) {
          ++rep.violations;
          if (margin < rep.worstViolation) {
            rep.worstViolation = margin;
            rep.witness = "S=" + std::to_string(S) + " i=" + std::to_string(i) + " j=" + std::to_string(j);
          }
        } else if (margin > tol) {
          ++rep.strictTriples;
        }
      }
    }
  }
  return rep;
}

}  // namespace udcran::oracle

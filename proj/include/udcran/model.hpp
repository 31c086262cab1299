#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace udcran {

/// Dual variables below this value are treated as this value wherever the
/// closed-form power formulas divide by them.
inline constexpr double kMuFloor = 1e-12;

/// Relative slack accepted on the fronthaul and per-RRH power constraints.
inline constexpr double kFeasibilityTol = 1e-9;

/// Largest cluster representable by RrhSet.
inline constexpr int kMaxRrhs = 63;

struct SystemDims {
  int rrhs = 1;         // M
  int users = 1;        // K
  int subcarriers = 1;  // N
  double accessBandwidthHz = 20e6;     // B
  double fronthaulBandwidthHz = 50e6;  // W

  void validate() const;
  double bandwidthPerSc() const { return accessBandwidthHz / subcarriers; }
};

/// Subset of RRHs stored as a bitmask (bit m set <=> RRH m selected).
class RrhSet {
 public:
  class iterator {
   public:
    using value_type = int;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    int operator*() const { return std::countr_zero(rest_); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr RrhSet() = default;
  constexpr explicit RrhSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr RrhSet single(int m) { return RrhSet(std::uint64_t{1} << m); }
  static constexpr RrhSet all(int rrhs) {
    return RrhSet(rrhs >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << rrhs) - 1);
  }

  constexpr bool contains(int m) const { return (bits_ >> m) & 1U; }
  constexpr RrhSet with(int m) const { return RrhSet(bits_ | (std::uint64_t{1} << m)); }
  constexpr RrhSet without(int m) const { return RrhSet(bits_ & ~(std::uint64_t{1} << m)); }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint64_t bits() const { return bits_; }

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  friend constexpr bool operator==(RrhSet, RrhSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

/// RNG seeds an instance was generated from, when it came from the channel
/// generator.
struct InstanceSeeds {
  std::uint64_t layout = 0;
  std::uint64_t fading = 0;
};

/// One network realization. Immutable after construction.
///
/// Gains are linear channel power gains |h_{k,m,n}|^2. Fronthaul rates are in
/// bit/s, noise power in W per subcarrier, power budgets in W.
class NetworkInstance {
 public:
  NetworkInstance(SystemDims dims, std::vector<double> gains, std::vector<double> fronthaulRates,
                  double noisePower, std::vector<double> maxPower, std::vector<double> weights,
                  std::vector<double> distances = {},
                  std::optional<InstanceSeeds> seeds = std::nullopt);

  const SystemDims& dims() const { return dims_; }
  int rrhs() const { return dims_.rrhs; }
  int users() const { return dims_.users; }
  int subcarriers() const { return dims_.subcarriers; }
  double bandwidthPerSc() const { return dims_.bandwidthPerSc(); }

  double gain(int k, int m, int n) const { return gains_[index(k, m, n)]; }
  double amplitude(int k, int m, int n) const { return amplitudes_[index(k, m, n)]; }
  double fronthaulRate(int m) const { return fronthaulRates_[m]; }
  double noisePower() const { return noisePower_; }
  double maxPower(int m) const { return maxPower_[m]; }
  double weight(int k) const { return weights_[k]; }
  double maxWeight() const;

  /// User-to-RRH distance in metres; only present for generated instances.
  bool hasDistances() const { return !distances_.empty(); }
  double distance(int k, int m) const { return distances_[static_cast<std::size_t>(k) * rrhs() + m]; }

  const std::vector<double>& gains() const { return gains_; }
  const std::vector<double>& fronthaulRates() const { return fronthaulRates_; }
  const std::vector<double>& maxPowers() const { return maxPower_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& distances() const { return distances_; }
  const std::optional<InstanceSeeds>& seeds() const { return seeds_; }

 private:
  std::size_t index(int k, int m, int n) const {
    return (static_cast<std::size_t>(k) * rrhs() + m) * subcarriers() + n;
  }

  SystemDims dims_;
  std::vector<double> gains_;
  std::vector<double> amplitudes_;
  std::vector<double> fronthaulRates_;
  double noisePower_;
  std::vector<double> maxPower_;
  std::vector<double> weights_;
  std::vector<double> distances_;
  std::optional<InstanceSeeds> seeds_;
};

/// Full primal solution: user association, RRH selection and powers per
/// subcarrier, plus fronthaul time shares per RRH.
struct Allocation {
  std::vector<std::optional<int>> userOnSc;  // size N
  std::vector<RrhSet> rrhSet;                // size N
  std::vector<double> powers;                // N x M, subcarrier-major
  std::vector<double> timeShare;             // size M
  int rrhs = 0;

  static Allocation empty(const SystemDims& dims);

  double& power(int m, int n) { return powers[static_cast<std::size_t>(n) * rrhs + m]; }
  double power(int m, int n) const { return powers[static_cast<std::size_t>(n) * rrhs + m]; }
  std::span<double> scPowers(int n) { return {powers.data() + static_cast<std::size_t>(n) * rrhs, static_cast<std::size_t>(rrhs)}; }
  std::span<const double> scPowers(int n) const {
    return {powers.data() + static_cast<std::size_t>(n) * rrhs, static_cast<std::size_t>(rrhs)};
  }
  int subcarriers() const { return static_cast<int>(userOnSc.size()); }

  /// Throws std::logic_error if the structural invariants do not hold.
  void checkWellFormed() const;
};

struct DualPoint {
  double lambda = 0.0;
  std::vector<double> mu;

  void validate() const;
};

/// Thrown by timeShares when the allocation violates the fronthaul budget.
class InfeasibleAllocation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rates and SNR.

double snr(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> power);
double scRate(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> power);

/// Rate delivered on subcarrier n by the allocation (0 when unassigned).
double allocatedScRate(const NetworkInstance& inst, const Allocation& alloc, int n);
double weightedSumRate(const NetworkInstance& inst, const Allocation& alloc);
double sumRate(const NetworkInstance& inst, const Allocation& alloc);

/// Left-hand side of the combined fronthaul time-sharing constraint.
double fronthaulUsage(const NetworkInstance& inst, const Allocation& alloc);
std::vector<double> timeShares(const NetworkInstance& inst, const Allocation& alloc);
double totalPower(const Allocation& alloc, int m);

bool isFeasible(const NetworkInstance& inst, const Allocation& alloc);

// Set functions of the per-subcarrier problem under optimal power.

double setF(const NetworkInstance& inst, int n, int k, RrhSet set, double lambda);
double setG(const NetworkInstance& inst, int n, int k, RrhSet set, std::span<const double> mu);
double optSnrSet(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual);
double setObjective(const NetworkInstance& inst, int n, int k, RrhSet set, const DualPoint& dual);

/// B/(N ln 2): the factor multiplying F*G in the optimal SNR.
double snrScale(const NetworkInstance& inst);

/// Objective value under optimal power given the set-function values.
/// `ratePerSc` is B/N.
double objectiveFromFG(double F, double G, double ratePerSc);

inline double flooredMu(double mu) { return mu < kMuFloor ? kMuFloor : mu; }

}  // namespace udcran

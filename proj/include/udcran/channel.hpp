#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "udcran/model.hpp"

namespace udcran {

using Rng = std::mt19937_64;

struct LayoutConfig {
  double clusterRadius = 500.0;  // m
  double cpDistance = 2000.0;    // m, CP to cluster centre
  std::uint64_t layoutSeed = 1;
  std::uint64_t fadingSeed = 2;

  void validate() const;
};

struct FadingConfig {
  double shadowingStdDb = 6.0;
  int pdpTaps = 0;  // 0 means ceil(N/4)
  /// Tap l carries power proportional to exp(-l / (taps * decayFraction)).
  double pdpDecayFraction = 0.25;
  double pathLossInterceptDb = 38.0;
  double pathLossSlopeDb = 30.0;  // per decade of distance
  double rrhAntennaGainDb = 2.0;
  double noiseDensityDbmHz = -174.0;
  double noiseFigureDb = 7.0;
  /// Distances are clamped here before the log-distance path loss.
  double minDistance = 1.0;

  int tapsFor(int subcarriers) const { return pdpTaps > 0 ? pdpTaps : (subcarriers + 3) / 4; }
  void validate() const;
};

struct FronthaulConfig {
  double carrierHz = 73e9;
  double bandwidthHz = 50e6;  // W
  double cpTxPowerDbm = 46.0;
  double cpAntennaGainDb = 27.0;
  /// Receive-side antenna gain at the RRH; not part of the reference link budget.
  double rrhAntennaGainDb = 0.0;
  double noiseDensityDbmHz = -174.0;
  double noiseFigureDb = 7.0;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Layout {
  std::vector<Point> rrhs;
  std::vector<Point> users;
  Point cp;
  Point centre;

  double userRrhDistance(int k, int m) const;
  double cpRrhDistance(int m) const;
};

/// RRHs and users i.i.d. uniform on the disk; CP on the x-axis at
/// `cpDistance` from the disk centre.
Layout generateLayout(const LayoutConfig& cfg, const SystemDims& dims, Rng& rng);

/// Line-of-sight mmWave path loss 69.7 + 24 log10(D) dB.
double losPathLossDb(double distance);

/// Access path loss before shadowing, 38 + 30 log10(d) dB by default.
double accessPathLossDb(const FadingConfig& cfg, double distance);

/// Shannon capacity of each CP-to-RRH link over the whole fronthaul band.
std::vector<double> fronthaulRates(const FronthaulConfig& cfg, const std::vector<double>& cpDistances);

/// Exponential power-delay profile normalised to unit total power.
std::vector<double> powerDelayProfile(int taps, double decayFraction);

/// Channel power gains, laid out as NetworkInstance expects (k, m, n).
std::vector<double> accessChannels(const FadingConfig& cfg, const Layout& layout, const SystemDims& dims, Rng& rng);

/// Noise power per subcarrier in W.
double noisePower(const FadingConfig& cfg, double accessBandwidthHz, int subcarriers);

double dbmToWatts(double dbm);

struct ScenarioConfig {
  SystemDims dims;
  LayoutConfig layout;
  FadingConfig fading;
  FronthaulConfig fronthaul;
  double maxPowerDbm = 24.0;
};

/// Generates a complete instance from the two seeds in `cfg.layout`.
/// The layout seed drives positions; the fading seed drives shadowing and
/// small-scale fading.
NetworkInstance generateInstance(const ScenarioConfig& cfg);

/// Instance (de)serialisation as JSON text: dims, gains in dB (null for a
/// zero gain), fronthaul rates in bit/s, and seeds when known.
std::string instanceToJson(const NetworkInstance& inst);
NetworkInstance instanceFromJson(const std::string& text);

}  // namespace udcran

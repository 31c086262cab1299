#include "udcran/channel.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace udcran {

namespace {

constexpr double kDbPerDecadeLos = 24.0;
constexpr double kLosInterceptDb = 69.7;

double dbToLinear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void LayoutConfig::validate() const {
  if (!(clusterRadius > 0)) throw std::invalid_argument("cluster radius must be positive");
  if (!(cpDistance > 0)) throw std::invalid_argument("CP distance must be positive");
}

void FadingConfig::validate() const {
  if (!(shadowingStdDb >= 0)) throw std::invalid_argument("shadowing std must be >= 0");
  if (pdpTaps < 0) throw std::invalid_argument("tap count must be >= 1 (or 0 for ceil(N/4))");
  if (!(pdpDecayFraction > 0)) throw std::invalid_argument("PDP decay fraction must be positive");
  if (!(minDistance > 0)) throw std::invalid_argument("minimum distance must be positive");
}

void FronthaulConfig::validate() const {
  if (!(bandwidthHz > 0)) throw std::invalid_argument("fronthaul bandwidth W must be positive");
}

double Layout::userRrhDistance(int k, int m) const {
  return std::hypot(users[k].x - rrhs[m].x, users[k].y - rrhs[m].y);
}

double Layout::cpRrhDistance(int m) const { return std::hypot(cp.x - rrhs[m].x, cp.y - rrhs[m].y); }

Layout generateLayout(const LayoutConfig& cfg, const SystemDims& dims, Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    // Inverse-CDF sampling of the radius gives a uniform density on the disk.
    const double r = cfg.clusterRadius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return Point{r * std::cos(theta), r * std::sin(theta)};
  };
  Layout layout;
  layout.centre = {0.0, 0.0};
  layout.cp = {cfg.cpDistance, 0.0};
  layout.rrhs.reserve(dims.rrhs);
  layout.users.reserve(dims.users);
  for (int m = 0; m < dims.rrhs; ++m) layout.rrhs.push_back(draw());
  for (int k = 0; k < dims.users; ++k) layout.users.push_back(draw());
  return layout;
}

double losPathLossDb(double distance) {
  if (!(distance > 0)) throw std::domain_error("path-loss distance must be positive");
  return kLosInterceptDb + kDbPerDecadeLos * std::log10(distance);
}

double accessPathLossDb(const FadingConfig& cfg, double distance) {
  const double d = std::max(distance, cfg.minDistance);
  return cfg.pathLossInterceptDb + cfg.pathLossSlopeDb * std::log10(d);
}

std::vector<double> fronthaulRates(const FronthaulConfig& cfg, const std::vector<double>& cpDistances) {
  cfg.validate();
  const double noiseDbm = cfg.noiseDensityDbmHz + 10.0 * std::log10(cfg.bandwidthHz) + cfg.noiseFigureDb;
  std::vector<double> rates;
  rates.reserve(cpDistances.size());
  for (double d : cpDistances) {
    const double rxDbm = cfg.cpTxPowerDbm + cfg.cpAntennaGainDb + cfg.rrhAntennaGainDb - losPathLossDb(d);
    rates.push_back(cfg.bandwidthHz * std::log2(1.0 + dbToLinear(rxDbm - noiseDbm)));
  }
  return rates;
}

std::vector<double> powerDelayProfile(int taps, double decayFraction) {
  if (taps < 1) throw std::invalid_argument("power delay profile needs at least one tap");
  const double tau = decayFraction * taps;
  std::vector<double> profile(taps);
  double total = 0.0;
  for (int l = 0; l < taps; ++l) {
    profile[l] = std::exp(-l / tau);
    total += profile[l];
  }
  for (double& p : profile) p /= total;
  return profile;
}

std::vector<double> accessChannels(const FadingConfig& cfg, const Layout& layout, const SystemDims& dims, Rng& rng) {
  cfg.validate();
  const int M = dims.rrhs;
  const int K = dims.users;
  const int N = dims.subcarriers;
  const int taps = cfg.tapsFor(N);
  const auto profile = powerDelayProfile(taps, cfg.pdpDecayFraction);

  // Twiddle factors e^{-j 2 pi q / N}; index (n * l) mod N.
  std::vector<std::complex<double>> twiddle(N);
  for (int q = 0; q < N; ++q) twiddle[q] = std::polar(1.0, -2.0 * std::numbers::pi * q / N);

  std::normal_distribution<double> shadow(0.0, cfg.shadowingStdDb);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> gains(static_cast<std::size_t>(K) * M * N);
  std::vector<std::complex<double>> tapGains(taps);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double shadowDb = cfg.shadowingStdDb > 0 ? shadow(rng) : 0.0;
      const double largeScale = dbToLinear(cfg.rrhAntennaGainDb - accessPathLossDb(cfg, layout.userRrhDistance(k, m)) - shadowDb);
      for (int l = 0; l < taps; ++l) {
        const double s = std::sqrt(profile[l] / 2.0);
        const double re = gauss(rng);
        const double im = gauss(rng);
        tapGains[l] = {s * re, s * im};
      }
      for (int n = 0; n < N; ++n) {
        std::complex<double> h{0.0, 0.0};
        for (int l = 0; l < taps; ++l) {
          h += tapGains[l] * twiddle[(static_cast<long long>(n) * l) % N];
        }
        gains[(static_cast<std::size_t>(k) * M + m) * N + n] = largeScale * std::norm(h);
      }
    }
  }
  return gains;
}

double dbmToWatts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double noisePower(const FadingConfig& cfg, double accessBandwidthHz, int subcarriers) {
  if (!(accessBandwidthHz > 0) || subcarriers < 1) throw std::invalid_argument("B and N must be positive");
  const double densityMwPerHz = dbToLinear(cfg.noiseDensityDbmHz + cfg.noiseFigureDb);
  return densityMwPerHz * (accessBandwidthHz / subcarriers) * 1e-3;
}

NetworkInstance generateInstance(const ScenarioConfig& cfg) {
  SystemDims dims = cfg.dims;
  dims.fronthaulBandwidthHz = cfg.fronthaul.bandwidthHz;
  dims.validate();

  Rng layoutRng(cfg.layout.layoutSeed);
  const Layout layout = generateLayout(cfg.layout, dims, layoutRng);
  Rng fadingRng(cfg.layout.fadingSeed);
  auto gains = accessChannels(cfg.fading, layout, dims, fadingRng);

  std::vector<double> cpDistances(dims.rrhs);
  for (int m = 0; m < dims.rrhs; ++m) cpDistances[m] = layout.cpRrhDistance(m);

  std::vector<double> distances(static_cast<std::size_t>(dims.users) * dims.rrhs);
  for (int k = 0; k < dims.users; ++k) {
    for (int m = 0; m < dims.rrhs; ++m) distances[static_cast<std::size_t>(k) * dims.rrhs + m] = layout.userRrhDistance(k, m);
  }

  return NetworkInstance(dims, std::move(gains), fronthaulRates(cfg.fronthaul, cpDistances),
                         noisePower(cfg.fading, dims.accessBandwidthHz, dims.subcarriers),
                         std::vector<double>(dims.rrhs, dbmToWatts(cfg.maxPowerDbm)),
                         std::vector<double>(dims.users, 1.0), std::move(distances),
                         InstanceSeeds{cfg.layout.layoutSeed, cfg.layout.fadingSeed});
}

std::string instanceToJson(const NetworkInstance& inst) {
  using nlohmann::json;
  const auto& d = inst.dims();
  json j;
  j["dims"] = {{"M", d.rrhs}, {"K", d.users}, {"N", d.subcarriers},
               {"B_hz", d.accessBandwidthHz}, {"W_hz", d.fronthaulBandwidthHz}};
  json gainsDb = json::array();
  for (double g : inst.gains()) gainsDb.push_back(g > 0 ? json(10.0 * std::log10(g)) : json(nullptr));
  j["gains_db"] = std::move(gainsDb);
  j["fronthaul_rate_bps"] = inst.fronthaulRates();
  j["noise_power_w"] = inst.noisePower();
  j["max_power_w"] = inst.maxPowers();
  j["weights"] = inst.weights();
  if (inst.hasDistances()) j["distances_m"] = inst.distances();
  if (inst.seeds()) j["seeds"] = {{"layout", inst.seeds()->layout}, {"fading", inst.seeds()->fading}};
  return j.dump(2);
}

NetworkInstance instanceFromJson(const std::string& text) {
  using nlohmann::json;
  const json j = json::parse(text);
  SystemDims dims;
  const auto& jd = j.at("dims");
  dims.rrhs = jd.at("M").get<int>();
  dims.users = jd.at("K").get<int>();
  dims.subcarriers = jd.at("N").get<int>();
  dims.accessBandwidthHz = jd.at("B_hz").get<double>();
  dims.fronthaulBandwidthHz = jd.at("W_hz").get<double>();
  std::vector<double> gains;
  for (const auto& g : j.at("gains_db")) gains.push_back(g.is_null() ? 0.0 : std::pow(10.0, g.get<double>() / 10.0));
  std::optional<InstanceSeeds> seeds;
  if (j.contains("seeds")) {
    seeds = InstanceSeeds{j["seeds"].at("layout").get<std::uint64_t>(), j["seeds"].at("fading").get<std::uint64_t>()};
  }
  return NetworkInstance(dims, std::move(gains), j.at("fronthaul_rate_bps").get<std::vector<double>>(),
                         j.at("noise_power_w").get<double>(), j.at("max_power_w").get<std::vector<double>>(),
                         j.at("weights").get<std::vector<double>>(),
                         j.value("distances_m", std::vector<double>{}), seeds);
}

}  // namespace udcran

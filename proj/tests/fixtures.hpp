#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "udcran/channel.hpp"
#include "udcran/model.hpp"

namespace fixtures {

using udcran::NetworkInstance;
using udcran::SystemDims;

/// Hand-built instance; gains laid out (k, m, n).
inline NetworkInstance handInstance(int M, int K, int N, std::vector<double> gains, std::vector<double> rates,
                                    double noise = 1.0, std::vector<double> maxPower = {},
                                    std::vector<double> weights = {}, double B = 0.0) {
  SystemDims d;
  d.rrhs = M;
  d.users = K;
  d.subcarriers = N;
  d.accessBandwidthHz = B > 0 ? B : static_cast<double>(N);  // B/N = 1 unless given
  if (maxPower.empty()) maxPower.assign(M, 1.0);
  if (weights.empty()) weights.assign(K, 1.0);
  return NetworkInstance(d, std::move(gains), std::move(rates), noise, std::move(maxPower), std::move(weights));
}

/// Generated instance with the reference channel model.
inline NetworkInstance generated(int M, int K, int N, std::uint64_t seed, double wHz = 50e6) {
  udcran::ScenarioConfig cfg;
  cfg.dims.rrhs = M;
  cfg.dims.users = K;
  cfg.dims.subcarriers = N;
  cfg.fronthaul.bandwidthHz = wHz;
  cfg.layout.layoutSeed = seed * 2 + 1;
  cfg.layout.fadingSeed = seed * 2 + 2;
  return udcran::generateInstance(cfg);
}

/// Random dual point around the natural scale of `inst`.
inline udcran::DualPoint randomDual(const NetworkInstance& inst, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logU(std::log(1e-3), std::log(1.0));
  udcran::DualPoint d;
  double maxR = 0.0;
  for (double r : inst.fronthaulRates()) maxR = std::max(maxR, r);
  d.lambda = std::exp(logU(rng)) * maxR * 0.5;
  d.mu.resize(inst.rrhs());
  for (int m = 0; m < inst.rrhs(); ++m) {
    d.mu[m] = std::exp(logU(rng)) * inst.dims().accessBandwidthHz / inst.maxPower(m) * 0.05;
  }
  return d;
}

}  // namespace fixtures

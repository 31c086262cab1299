#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "udcran/channel.hpp"

using namespace udcran;

TEST_CASE("layout stays in the disk and is seeded") {
  LayoutConfig cfg;
  SystemDims dims;
  dims.rrhs = 50;
  dims.users = 50;
  Rng a(42), b(42);
  const Layout la = generateLayout(cfg, dims, a);
  const Layout lb = generateLayout(cfg, dims, b);
  for (const auto& p : la.rrhs) CHECK(std::hypot(p.x, p.y) <= 500.0);
  for (const auto& p : la.users) CHECK(std::hypot(p.x, p.y) <= 500.0);
  CHECK(std::hypot(la.cp.x, la.cp.y) == doctest::Approx(2000.0));
  for (int i = 0; i < 50; ++i) {
    CHECK(la.users[i].x == lb.users[i].x);
    CHECK(la.rrhs[i].y == lb.rrhs[i].y);
  }
  LayoutConfig bad;
  bad.clusterRadius = -1;
  CHECK_THROWS(generateLayout(bad, dims, a));
}

TEST_CASE("uniform disk mean radius") {
  LayoutConfig cfg;
  SystemDims dims;
  dims.rrhs = 1;
  dims.users = 100000;
  Rng rng(1);
  const Layout l = generateLayout(cfg, dims, rng);
  double sum = 0.0;
  for (const auto& p : l.users) sum += std::hypot(p.x, p.y);
  CHECK(std::abs(sum / dims.users - 2.0 * 500.0 / 3.0) <= 2.0);
}

TEST_CASE("line-of-sight path loss") {
  CHECK(losPathLossDb(1.0) == doctest::Approx(69.7));
  CHECK(losPathLossDb(2000.0) == doctest::Approx(69.7 + 24.0 * std::log10(2000.0)));
  CHECK(losPathLossDb(2000.0) == doctest::Approx(148.92).epsilon(1e-4));
  CHECK(losPathLossDb(10.0) < losPathLossDb(11.0));
  CHECK_THROWS_AS(losPathLossDb(0.0), std::domain_error);
  CHECK_THROWS_AS(losPathLossDb(-3.0), std::domain_error);
}

TEST_CASE("fronthaul rates") {
  FronthaulConfig cfg;
  const std::vector<double> d{1800.0, 2000.0, 2300.0};
  const auto r = fronthaulRates(cfg, d);
  CHECK(r[0] > r[1]);
  CHECK(r[1] > r[2]);
  FronthaulConfig wide = cfg;
  wide.bandwidthHz *= 2;
  const auto rw = fronthaulRates(wide, d);
  for (int m = 0; m < 3; ++m) CHECK(rw[m] > r[m]);
  FronthaulConfig zero = cfg;
  zero.bandwidthHz = 0;
  CHECK_THROWS(fronthaulRates(zero, d));

  // Order-of-magnitude check at 250 MHz over 2 km.
  FronthaulConfig eband = cfg;
  eband.bandwidthHz = 250e6;
  const double rate = fronthaulRates(eband, {2000.0})[0];
  CHECK(rate > 2.5e8);
  CHECK(rate < 1e10);
}

TEST_CASE("power delay profile") {
  for (int taps : {1, 4, 16, 32}) {
    const auto p = powerDelayProfile(taps, 0.25);
    double sum = 0.0;
    for (double x : p) sum += x;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (int l = 1; l + 1 < taps; ++l) {
      CHECK(p[l] / p[l - 1] == doctest::Approx(p[l + 1] / p[l]).epsilon(1e-12));
      CHECK(p[l] < p[l - 1]);
    }
  }
  CHECK_THROWS(powerDelayProfile(0, 0.25));
  FadingConfig f;
  CHECK(f.tapsFor(128) == 32);
  CHECK(f.tapsFor(6) == 2);
}

TEST_CASE("per-subcarrier gains average to the large-scale gain") {
  FadingConfig cfg;
  cfg.shadowingStdDb = 0.0;
  SystemDims dims;
  dims.rrhs = 1;
  dims.users = 1;
  dims.subcarriers = 16;
  Layout layout;
  layout.rrhs = {{0.0, 0.0}};
  layout.users = {{100.0, 0.0}};
  const double largeScale = std::pow(10.0, (cfg.rrhAntennaGainDb - accessPathLossDb(cfg, 100.0)) / 10.0);
  Rng rng(3);
  double sum = 0.0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const auto g = accessChannels(cfg, layout, dims, rng);
    for (double x : g) sum += x;
  }
  CHECK(sum / (reps * 16.0) == doctest::Approx(largeScale).epsilon(0.03));
}

TEST_CASE("equidistant users share the large-scale gain without shadowing") {
  FadingConfig cfg;
  cfg.shadowingStdDb = 0.0;
  SystemDims dims;
  dims.rrhs = 1;
  dims.users = 2;
  dims.subcarriers = 8;
  Layout layout;
  layout.rrhs = {{0.0, 0.0}};
  layout.users = {{0.0, 150.0}, {150.0, 0.0}};
  Rng rng(9);
  double s0 = 0.0, s1 = 0.0;
  for (int r = 0; r < 4000; ++r) {
    const auto g = accessChannels(cfg, layout, dims, rng);
    for (int n = 0; n < 8; ++n) {
      s0 += g[n];
      s1 += g[8 + n];
    }
  }
  CHECK(s0 == doctest::Approx(s1).epsilon(0.05));
}

TEST_CASE("small-scale power is unit-mean exponential (KS test)") {
  FadingConfig cfg;
  cfg.shadowingStdDb = 0.0;
  SystemDims dims;
  dims.rrhs = 1;
  dims.users = 1;
  dims.subcarriers = 8;
  Layout layout;
  layout.rrhs = {{0.0, 0.0}};
  layout.users = {{50.0, 0.0}};
  const double largeScale = std::pow(10.0, (cfg.rrhAntennaGainDb - accessPathLossDb(cfg, 50.0)) / 10.0);
  Rng rng(17);
  const int samples = 100000;
  std::vector<double> x;
  x.reserve(samples);
  for (int r = 0; r < samples; ++r) {
    const auto g = accessChannels(cfg, layout, dims, rng);
    x.push_back(g[r % 8] / largeScale);  // one subcarrier per draw keeps samples independent
  }
  std::sort(x.begin(), x.end());
  double D = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double F = 1.0 - std::exp(-x[i]);
    D = std::max({D, (i + 1.0) / samples - F, F - static_cast<double>(i) / samples});
  }
  CHECK(D < 1.628 / std::sqrt(static_cast<double>(samples)));
}

TEST_CASE("noise power per subcarrier") {
  FadingConfig cfg;
  const double s = noisePower(cfg, 20e6, 128);
  CHECK(s == doctest::Approx(std::pow(10.0, -16.7) * 156250.0 * 1e-3).epsilon(1e-12));
  CHECK(s == doctest::Approx(3.12e-15).epsilon(0.01));
  CHECK(noisePower(cfg, 20e6, 256) == doctest::Approx(s / 2));
  FadingConfig quiet = cfg;
  quiet.noiseFigureDb = 0.0;
  CHECK(noisePower(quiet, 20e6, 128) == doctest::Approx(s / std::pow(10.0, 0.7)));
  CHECK_THROWS(noisePower(cfg, 0.0, 128));
}

TEST_CASE("generated instances are positive, finite and reproducible") {
  const auto a = fixtures::generated(6, 8, 32, 5);
  const auto b = fixtures::generated(6, 8, 32, 5);
  CHECK(a.gains() == b.gains());
  CHECK(a.fronthaulRates() == b.fronthaulRates());
  for (double g : a.gains()) {
    CHECK(g > 0);
    CHECK(std::isfinite(g));
  }
  for (double r : a.fronthaulRates()) CHECK(r > 0);
  CHECK(a.noisePower() > 0);
  CHECK(a.maxPower(0) == doctest::Approx(0.2511886));
  CHECK(a.hasDistances());
  const auto c = fixtures::generated(6, 8, 32, 6);
  CHECK(a.gains() != c.gains());
}

TEST_CASE("instance JSON round trip") {
  const auto a = fixtures::generated(3, 2, 8, 2);
  const auto b = instanceFromJson(instanceToJson(a));
  CHECK(b.rrhs() == 3);
  CHECK(b.users() == 2);
  CHECK(b.subcarriers() == 8);
  for (std::size_t i = 0; i < a.gains().size(); ++i) CHECK(b.gains()[i] == doctest::Approx(a.gains()[i]).epsilon(1e-12));
  CHECK(b.fronthaulRates() == a.fronthaulRates());
  REQUIRE(b.seeds());
  CHECK(b.seeds()->layout == a.seeds()->layout);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "udcran/ellipsoid.hpp"

using namespace udcran;

TEST_CASE("central-cut volume ratio") {
  for (int n = 1; n <= 10; ++n) {
    const double r = ellipsoidVolumeRatio(n);
    CHECK(r < std::exp(-1.0 / (2.0 * n)));
    CHECK(r > 0.0);
  }
  CHECK(ellipsoidVolumeRatio(1) == doctest::Approx(0.5));
}

TEST_CASE("cut shrinks volume by the analytic ratio") {
  for (int n = 2; n <= 6; ++n) {
    EllipsoidState e = EllipsoidState::ball(Eigen::VectorXd::Zero(n), 2.0);
    std::mt19937_64 rng(n);
    std::normal_distribution<double> z;
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd g(n);
      for (int j = 0; j < n; ++j) g[j] = z(rng);
      const double before = e.logDetShape();
      e.cut(g);
      // Volume scales with sqrt(det P).
      CHECK(0.5 * (e.logDetShape() - before) == doctest::Approx(std::log(ellipsoidVolumeRatio(n))).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadratic toy problems") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 7; ++n) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd Q = A * A.transpose() + Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd xStar(n);
    for (int i = 0; i < n; ++i) xStar[i] = 0.2 + 0.6 * u(rng);
    const double fStar = 1.0;
    const ConvexOracle f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const Eigen::VectorXd d = x - xStar;
      g = 2.0 * Q * d;
      return fStar + d.dot(Q * d);
    };
    EllipsoidOptions opts;
    opts.maxIterations = 500;
    opts.relativeTolerance = 0.0;
    opts.absoluteTolerance = 1e-6;
    const auto r = ellipsoidMinimize(EllipsoidState::ball(Eigen::VectorXd::Constant(n, 0.5), std::sqrt(n)), f, opts);
    CHECK(r.iterations <= 500);
    CHECK(r.bestValue - fStar <= 1e-4);
  }
}

TEST_CASE("running minimum never increases") {
  const int n = 3;
  const Eigen::VectorXd target = Eigen::Vector3d(0.3, 1.2, 0.7);
  const ConvexOracle f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(n);
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      v += std::abs(x[i] - target[i]);
      g[i] = x[i] >= target[i] ? 1.0 : -1.0;
    }
    return v;
  };
  EllipsoidOptions opts;
  opts.maxIterations = 300;
  opts.absoluteTolerance = 1e-8;
  opts.relativeTolerance = 0.0;
  const auto r = ellipsoidMinimize(EllipsoidState::ball(Eigen::VectorXd::Constant(n, 1.0), 3.0), f, opts);
  REQUIRE(r.trace.size() > 10);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].bestValue <= r.trace[i - 1].bestValue);
  CHECK(r.bestValue < 1e-3);
}

TEST_CASE("box lower bound is respected") {
  // Unconstrained minimum at -1; the box optimum is at 0.
  const ConvexOracle f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x.array() + 1.0).matrix();
    return (x.array() + 1.0).square().sum();
  };
  EllipsoidOptions opts;
  opts.relativeTolerance = 1e-9;
  const auto r = ellipsoidMinimize(EllipsoidState::ball(Eigen::VectorXd::Constant(2, 0.5), 2.0), f, opts);
  CHECK(r.best.minCoeff() >= 0.0);
  CHECK(r.bestValue == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("degenerate cuts raise breakdown") {
  EllipsoidState e = EllipsoidState::ball(Eigen::VectorXd::Zero(2), 1.0);
  CHECK_THROWS_AS(e.cut(Eigen::VectorXd::Zero(2)), EllipsoidBreakdown);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS(EllipsoidState(Eigen::VectorXd::Zero(2), singular));
  const ConvexOracle bad = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Constant(2, std::nan(""));
    return 0.0;
  };
  CHECK_THROWS_AS(ellipsoidMinimize(EllipsoidState::ball(Eigen::VectorXd::Constant(2, 0.5), 1.0), bad),
                  EllipsoidBreakdown);
}

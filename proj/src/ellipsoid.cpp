#include "udcran/ellipsoid.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace udcran {

EllipsoidState::EllipsoidState(Eigen::VectorXd center, Eigen::MatrixXd shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  if (center_.size() == 0) throw std::invalid_argument("ellipsoid dimension must be positive");
  if (shape_.rows() != center_.size() || shape_.cols() != center_.size()) {
    throw std::invalid_argument("ellipsoid shape must be square and match the centre");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(shape_).info() != Eigen::Success) {
    throw EllipsoidBreakdown("initial shape matrix is not positive definite");
  }
}

EllipsoidState EllipsoidState::ball(const Eigen::VectorXd& center, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("ellipsoid radius must be positive");
  const auto n = center.size();
  return EllipsoidState(center, Eigen::MatrixXd::Identity(n, n) * radius * radius);
}

double EllipsoidState::cutWidth(const Eigen::VectorXd& g) const {
  const double q = g.dot(shape_ * g);
  return q > 0 ? std::sqrt(q) : 0.0;
}

void EllipsoidState::cut(const Eigen::VectorXd& g) {
  const Eigen::VectorXd Pg = shape_ * g;
  const double q = g.dot(Pg);
  if (!(q > 0) || !std::isfinite(q)) {
    throw EllipsoidBreakdown("degenerate cut at iteration " + std::to_string(iteration_) +
                             ": g^T P g = " + std::to_string(q));
  }
  const double width = std::sqrt(q);
  const Eigen::VectorXd b = Pg / width;
  const int n = dim();
  if (n == 1) {
    // Interval halving.
    center_ -= 0.5 * b;
    shape_ *= 0.25;
  } else {
    const double nn = n;
    center_ -= b / (nn + 1.0);
    shape_ = (nn * nn / (nn * nn - 1.0)) * (shape_ - (2.0 / (nn + 1.0)) * b * b.transpose());
    shape_ = 0.5 * (shape_ + shape_.transpose());
  }
  ++iteration_;
  if (!center_.allFinite() || Eigen::LLT<Eigen::MatrixXd>(shape_).info() != Eigen::Success) {
    throw EllipsoidBreakdown("shape matrix lost positive definiteness at iteration " + std::to_string(iteration_) +
                             " (min diagonal " + std::to_string(shape_.diagonal().minCoeff()) + ")");
  }
}

double EllipsoidState::logDetShape() const {
  Eigen::LLT<Eigen::MatrixXd> llt(shape_);
  if (llt.info() != Eigen::Success) throw EllipsoidBreakdown("shape matrix is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double ellipsoidVolumeRatio(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be positive");
  if (n == 1) return 0.5;
  const double d = n;
  return d / (d + 1.0) * std::pow(d * d / (d * d - 1.0), (d - 1.0) / 2.0);
}

EllipsoidResult ellipsoidMinimize(EllipsoidState state, const ConvexOracle& oracle, const EllipsoidOptions& opts) {
  const int n = state.dim();
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(n);
  if (!opts.lowerBound.empty()) {
    if (static_cast<int>(opts.lowerBound.size()) != n) throw std::invalid_argument("lower bound has wrong dimension");
    for (int i = 0; i < n; ++i) lower[i] = opts.lowerBound[i];
  }

  EllipsoidResult result;
  result.bestValue = std::numeric_limits<double>::infinity();
  Eigen::VectorXd g(n);

  for (int it = 0; it < opts.maxIterations; ++it) {
    const Eigen::VectorXd& x = state.center();
    EllipsoidStep step;
    step.iteration = it;
    step.center = x;

    Eigen::Index worst = 0;
    const double violation = (lower - x).maxCoeff(&worst);
    if (violation > 0) {
      g.setZero();
      g[worst] = -1.0;
      step.feasibilityCut = true;
      step.width = state.cutWidth(g);
      step.bestValue = result.bestValue;
      result.trace.push_back(std::move(step));
      state.cut(g);
      result.iterations = it + 1;
      continue;
    }

    g.setZero();
    const double value = oracle(x, g);
    ++result.evaluations;
    if (!std::isfinite(value) || !g.allFinite()) {
      throw EllipsoidBreakdown("oracle returned a non-finite value or subgradient at iteration " + std::to_string(it));
    }
    if (value < result.bestValue) {
      result.bestValue = value;
      result.best = x;
    }
    const double width = state.cutWidth(g);
    step.value = value;
    step.width = width;
    step.bestValue = result.bestValue;
    result.trace.push_back(std::move(step));
    result.iterations = it + 1;

    const double tol = std::max(opts.absoluteTolerance, opts.relativeTolerance * std::abs(result.bestValue));
    if (width <= tol) {
      result.converged = true;
      break;
    }
    state.cut(g);
  }
  if (result.evaluations == 0) {
    // Every centre was outside the box; report the projection of the last one.
    result.best = state.center().cwiseMax(lower);
    Eigen::VectorXd unused(n);
    result.bestValue = oracle(result.best, unused);
    result.evaluations = 1;
  }
  return result;
}

}  // namespace udcran

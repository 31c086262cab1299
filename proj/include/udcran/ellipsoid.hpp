#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace udcran {

/// Raised when the shape matrix stops being positive definite.
class EllipsoidBreakdown : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ellipsoid {x : (x - c)^T P^{-1} (x - c) <= 1}.
class EllipsoidState {
 public:
  EllipsoidState(Eigen::VectorXd center, Eigen::MatrixXd shape);

  /// Ball of the given radius around `center`.
  static EllipsoidState ball(const Eigen::VectorXd& center, double radius);

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }
  int dim() const { return static_cast<int>(center_.size()); }
  int iteration() const { return iteration_; }

  /// sqrt(g^T P g).
  double cutWidth(const Eigen::VectorXd& g) const;

  /// Central cut keeping {x : g^T (x - c) <= 0}. Throws EllipsoidBreakdown if
  /// the updated shape is not positive definite or g^T P g <= 0.
  void cut(const Eigen::VectorXd& g);

  /// log det P, for volume bookkeeping.
  double logDetShape() const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
  int iteration_ = 0;
};

/// Analytic per-iteration volume ratio of the central-cut update in
/// dimension n; below exp(-1 / (2n)).
double ellipsoidVolumeRatio(int n);

struct EllipsoidOptions {
  int maxIterations = 2000;
  /// Stop once sqrt(g^T P g) <= max(absoluteTolerance,
  /// relativeTolerance * |best value|).
  double relativeTolerance = 1e-4;
  double absoluteTolerance = 0.0;
  /// Componentwise lower bound of the feasible box; empty means all zeros.
  std::vector<double> lowerBound;
};

struct EllipsoidStep {
  int iteration = 0;
  Eigen::VectorXd center;
  bool feasibilityCut = false;
  double value = 0.0;        // objective at the centre (objective cuts only)
  double width = 0.0;        // sqrt(g^T P g) of the applied cut
  double bestValue = 0.0;    // running minimum over evaluated centres
};

struct EllipsoidResult {
  Eigen::VectorXd best;      // lowest-value evaluated point
  double bestValue = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<EllipsoidStep> trace;
};

/// Returns f(x) and writes a subgradient of f at x into `g`.
using ConvexOracle = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;

/// Minimises a convex function over {x >= lowerBound} starting from `start`.
/// Centres outside the box receive a feasibility cut on their most violated
/// coordinate and are not evaluated.
EllipsoidResult ellipsoidMinimize(EllipsoidState start, const ConvexOracle& oracle, const EllipsoidOptions& opts = {});

}  // namespace udcran

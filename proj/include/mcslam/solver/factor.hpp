#pragma once

#include <Eigen/Core>
#include <array>
#include <limits>

#include "mcslam/geometry/pose2.hpp"

namespace mcslam::solver {

using geometry::Pose2;
using geometry::Vector2;
using geometry::Vector3;

// Manifold convention used by every factor and by the solver:
//   X [+] d = Pose2(d.x, d.y, d.theta) * X     (left composition)
// Jacobians below are derivatives w.r.t. d at d = 0.

enum class FactorKind { PointPair, PointLine, PosePrior, RelativePose };

/// Huber on chi2. An infinite delta disables robustification.
struct RobustKernel {
  double delta = std::numeric_limits<double>::infinity();

  static RobustKernel huber(double delta) { return RobustKernel{delta}; }
  bool active() const { return std::isfinite(delta); }
};

struct KernelOutput {
  double chi2 = 0.0;
  double weight = 1.0;
};

/// (chi2, 1) inside delta^2, (2 delta sqrt(chi2) - delta^2, delta / sqrt(chi2)) outside.
KernelOutput robustify(const RobustKernel& kernel, double chi2);

using Residual = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using JacobianBlock = Eigen::Matrix<double, Eigen::Dynamic, 3, 0, 3, 3>;
using InformationMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

struct Factor {
  FactorKind kind = FactorKind::PosePrior;
  std::array<int, 2> variables{0, 0};  // second only used by RelativePose
  // point factors: moving point (variable frame), fixed point, fixed normal
  Vector2 moving = Vector2::Zero();
  Vector2 fixed = Vector2::Zero();
  Vector2 normal = Vector2::Zero();
  // pose factors
  Pose2 measurement;
  InformationMatrix information;
  RobustKernel kernel;

  int dimension() const;
  int arity() const { return kind == FactorKind::RelativePose ? 2 : 1; }
};

// Constructors validate the information matrix (symmetric within 1e-12,
// positive definite) and throw InvalidArgument otherwise.
Factor point_pair(int variable, const Vector2& moving, const Vector2& fixed,
                  const Eigen::Matrix2d& information = Eigen::Matrix2d::Identity(),
                  RobustKernel kernel = {});
Factor point_line(int variable, const Vector2& moving, const Vector2& fixed, const Vector2& normal,
                  double information = 1.0, RobustKernel kernel = {});
Factor pose_prior(int variable, const Pose2& measurement,
                  const Eigen::Matrix3d& information = Eigen::Matrix3d::Identity(), RobustKernel kernel = {});
Factor relative_pose(int from, int to, const Pose2& measurement,
                     const Eigen::Matrix3d& information = Eigen::Matrix3d::Identity(),
                     RobustKernel kernel = {});

struct Linearization {
  Residual error;
  std::array<JacobianBlock, 2> jacobians;
};

/// Residuals:
///   point_pair     X*p_m - p_f
///   point_line     n . (X*p_m - p_f)
///   pose_prior     log(Z^-1 * X)             as (dx, dy, dtheta)
///   relative_pose  log(Z^-1 * (Xi^-1 * Xj))
/// `second` is only read for relative_pose.
Linearization residual_and_jacobian(const Factor& f, const Pose2& first, const Pose2& second = {});

/// Residual only; used for chi2 evaluation.
Residual residual(const Factor& f, const Pose2& first, const Pose2& second = {});

/// Applies the manifold increment: Pose2(delta) * x.
inline Pose2 boxplus(const Pose2& x, const Vector3& delta) { return compose(Pose2::from_vector(delta), x); }

}  // namespace mcslam::solver

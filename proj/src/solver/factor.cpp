#include "mcslam/solver/factor.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "mcslam/core/error.hpp"

namespace mcslam::solver {

namespace {

// d/dtheta of R(theta) at 0, applied to v
Vector2 perp(const Vector2& v) { return {-v.y(), v.x()}; }

template <typename M>
void check_information(const M& info) {
  if ((info - info.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "information matrix is not symmetric");
  }
  const Eigen::MatrixXd dense = info;
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "information matrix is not positive definite");
  }
}

Residual pose_error(const Pose2& e) {
  Residual r(3);
  r << e.x, e.y, e.theta;
  return r;
}

// Jacobian of log(A * X) w.r.t. the left increment of X.
JacobianBlock left_jacobian(const Pose2& a, const Pose2& x) {
  const Eigen::Matrix2d ra = a.rotation();
  JacobianBlock j(3, 3);
  j.setZero();
  j.topLeftCorner<2, 2>() = ra;
  j.block<2, 1>(0, 2) = ra * perp(x.translation());
  j(2, 2) = 1.0;
  return j;
}

}  // namespace

KernelOutput robustify(const RobustKernel& kernel, double chi2) {
  if (!kernel.active()) return {chi2, 1.0};
  const double d2 = kernel.delta * kernel.delta;
  if (chi2 <= d2) return {chi2, 1.0};
  const double root = std::sqrt(chi2);
  return {2.0 * kernel.delta * root - d2, kernel.delta / root};
}

int Factor::dimension() const {
  switch (kind) {
    case FactorKind::PointPair: return 2;
    case FactorKind::PointLine: return 1;
    case FactorKind::PosePrior:
    case FactorKind::RelativePose: return 3;
  }
  return 0;
}

Factor point_pair(int variable, const Vector2& moving, const Vector2& fixed, const Eigen::Matrix2d& information,
                  RobustKernel kernel) {
  check_information(information);
  Factor f;
  f.kind = FactorKind::PointPair;
  f.variables = {variable, variable};
  f.moving = moving;
  f.fixed = fixed;
  f.information = information;
  f.kernel = kernel;
  return f;
}

Factor point_line(int variable, const Vector2& moving, const Vector2& fixed, const Vector2& normal,
                  double information, RobustKernel kernel) {
  if (!(information > 0.0)) throw Error(ErrorCode::InvalidArgument, "point_line information must be > 0");
  Factor f;
  f.kind = FactorKind::PointLine;
  f.variables = {variable, variable};
  f.moving = moving;
  f.fixed = fixed;
  f.normal = normal;
  f.information.resize(1, 1);
  f.information(0, 0) = information;
  f.kernel = kernel;
  return f;
}

Factor pose_prior(int variable, const Pose2& measurement, const Eigen::Matrix3d& information, RobustKernel kernel) {
  check_information(information);
  Factor f;
  f.kind = FactorKind::PosePrior;
  f.variables = {variable, variable};
  f.measurement = measurement;
  f.information = information;
  f.kernel = kernel;
  return f;
}

Factor relative_pose(int from, int to, const Pose2& measurement, const Eigen::Matrix3d& information,
                     RobustKernel kernel) {
  if (from == to) throw Error(ErrorCode::InvalidArgument, "relative_pose needs two distinct variables");
  check_information(information);
  Factor f;
  f.kind = FactorKind::RelativePose;
  f.variables = {from, to};
  f.measurement = measurement;
  f.information = information;
  f.kernel = kernel;
  return f;
}

Residual residual(const Factor& f, const Pose2& first, const Pose2& second) {
  switch (f.kind) {
    case FactorKind::PointPair: {
      Residual r(2);
      r = transform_point(first, f.moving) - f.fixed;
      return r;
    }
    case FactorKind::PointLine: {
      Residual r(1);
      r(0) = f.normal.dot(transform_point(first, f.moving) - f.fixed);
      return r;
    }
    case FactorKind::PosePrior: return pose_error(between(f.measurement, first));
    case FactorKind::RelativePose:
      return pose_error(between(f.measurement, between(first, second)));
  }
  return {};
}

Linearization residual_and_jacobian(const Factor& f, const Pose2& first, const Pose2& second) {
  Linearization lin;
  switch (f.kind) {
    case FactorKind::PointPair: {
      const Vector2 q = transform_point(first, f.moving);
      lin.error.resize(2);
      lin.error = q - f.fixed;
      lin.jacobians[0].resize(2, 3);
      lin.jacobians[0].topLeftCorner<2, 2>().setIdentity();
      lin.jacobians[0].col(2) = perp(q);
      break;
    }
    case FactorKind::PointLine: {
      const Vector2 q = transform_point(first, f.moving);
      lin.error.resize(1);
      lin.error(0) = f.normal.dot(q - f.fixed);
      lin.jacobians[0].resize(1, 3);
      lin.jacobians[0] << f.normal.x(), f.normal.y(), f.normal.dot(perp(q));
      break;
    }
    case FactorKind::PosePrior: {
      lin.error = pose_error(between(f.measurement, first));
      lin.jacobians[0] = left_jacobian(inverse(f.measurement), first);
      break;
    }
    case FactorKind::RelativePose: {
      lin.error = pose_error(between(f.measurement, between(first, second)));
      lin.jacobians[1] = left_jacobian(compose(inverse(f.measurement), inverse(first)), second);
      lin.jacobians[0] = -lin.jacobians[1];
      break;
    }
  }
  return lin;
}

}  // namespace mcslam::solver

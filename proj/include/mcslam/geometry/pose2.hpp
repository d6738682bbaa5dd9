#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

namespace mcslam::geometry {

using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;

/// Wraps an angle into (-pi, pi]. wrap_angle(pi) == pi.
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

/// Rigid transform in the plane. theta is kept in (-pi, pi].
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2() = default;
  Pose2(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  static Pose2 identity() { return {}; }
  /// Reads (x, y, theta) from a vector; the angle is wrapped.
  static Pose2 from_vector(const Vector3& v) { return {v.x(), v.y(), v.z()}; }

  Vector3 to_vector() const { return {x, y, theta}; }
  Vector2 translation() const { return {x, y}; }
  Eigen::Matrix2d rotation() const;
  Eigen::Matrix3d matrix() const;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta); }

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

struct StampedPose {
  double timestamp = 0.0;
  Pose2 pose;

  friend bool operator==(const StampedPose&, const StampedPose&) = default;
};

Pose2 compose(const Pose2& a, const Pose2& b);
Pose2 inverse(const Pose2& a);
Vector2 transform_point(const Pose2& a, const Vector2& p);
/// Rotation only, for direction vectors such as normals.
Vector2 rotate(const Pose2& a, const Vector2& v);

/// inv(b) * a, evaluated as R_b^T (t_a - t_b) so that between(a, a) is exactly identity.
inline Pose2 between(const Pose2& b, const Pose2& a) {
  const double c = std::cos(b.theta);
  const double s = std::sin(b.theta);
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return {c * dx + s * dy, -s * dx + c * dy, a.theta - b.theta};
}

inline Pose2 operator*(const Pose2& a, const Pose2& b) { return compose(a, b); }
inline Vector2 operator*(const Pose2& a, const Vector2& p) { return transform_point(a, p); }

/// Component-wise closeness with angle difference wrapped.
bool approx_equal(const Pose2& a, const Pose2& b, double tol_trans, double tol_rot);

}  // namespace mcslam::geometry

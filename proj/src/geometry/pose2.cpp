#include "mcslam/geometry/pose2.hpp"

namespace mcslam::geometry {

Eigen::Matrix2d Pose2::rotation() const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix3d Pose2::matrix() const {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation();
  m(0, 2) = x;
  m(1, 2) = y;
  return m;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta};
}

Pose2 inverse(const Pose2& a) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {-c * a.x - s * a.y, s * a.x - c * a.y, -a.theta};
}

Vector2 transform_point(const Pose2& a, const Vector2& p) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * p.x() - s * p.y(), a.y + s * p.x() + c * p.y()};
}

Vector2 rotate(const Pose2& a, const Vector2& v) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

bool approx_equal(const Pose2& a, const Pose2& b, double tol_trans, double tol_rot) {
  return std::abs(a.x - b.x) <= tol_trans && std::abs(a.y - b.y) <= tol_trans &&
         std::abs(wrap_angle(a.theta - b.theta)) <= tol_rot;
}

}  // namespace mcslam::geometry

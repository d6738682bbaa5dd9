#include "mcslam/geometry/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace mcslam::geometry {

namespace {

bool normals_compatible(const PointCloud2& fixed, std::size_t fi, const PointCloud2& moving,
                        std::size_t mi, const Pose2& guess, double max_angle) {
  if (!fixed.has_normal(fi) || !moving.has_normal(mi)) return true;
  const double c = std::clamp(fixed.normals[fi].dot(rotate(guess, moving.normals[mi])), -1.0, 1.0);
  return std::acos(c) <= max_angle;
}

template <typename Nearest>
std::vector<Correspondence> associate(const PointCloud2& fixed, const PointCloud2& moving, const Pose2& guess,
                                      const CorrespondenceGates& gates, Nearest&& nearest, bool parallel) {
  const std::size_t n = moving.size();
  std::vector<std::optional<Correspondence>> slots(n);
  const double gate2 = gates.distance * gates.distance;
#pragma omp parallel for schedule(static) if (parallel && n > 512)
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2 q = transform_point(guess, moving.points[i]);
    Neighbor best;
    if (!nearest(q, gate2, best)) continue;
    if (!normals_compatible(fixed, best.index, moving, i, guess, gates.normal_angle)) continue;
    slots[i] = Correspondence{best.index, i, std::sqrt(best.squared_distance)};
  }
  std::vector<Correspondence> out;
  out.reserve(n);
  for (auto& s : slots) {
    if (s) out.push_back(*s);
  }
  return out;
}

}  // namespace

CorrespondenceFinder::CorrespondenceFinder(const PointCloud2& fixed) : fixed_(fixed), tree_(fixed.points) {}

std::vector<Correspondence> CorrespondenceFinder::find(const PointCloud2& moving, const Pose2& guess,
                                                       const CorrespondenceGates& gates) const {
  return associate(
      fixed_, moving, guess, gates,
      [&](const Vector2& q, double gate2, Neighbor& out) { return tree_.nearest(q, gate2, out); }, true);
}

std::vector<Correspondence> find_correspondences(const PointCloud2& fixed, const PointCloud2& moving,
                                                 const Pose2& guess, const CorrespondenceGates& gates) {
  return CorrespondenceFinder(fixed).find(moving, guess, gates);
}

std::vector<Correspondence> find_correspondences_reference(const PointCloud2& fixed,
                                                           const PointCloud2& moving, const Pose2& guess,
                                                           const CorrespondenceGates& gates) {
  const auto brute = [&](const Vector2& q, double gate2, Neighbor& out) {
    bool found = false;
    for (std::size_t j = 0; j < fixed.size(); ++j) {
      const double d2 = squared_distance(q, fixed.points[j]);
      if (d2 > gate2) continue;
      if (!found || d2 < out.squared_distance) {
        out = {j, d2};
        found = true;
      }
    }
    return found;
  };
  return associate(fixed, moving, guess, gates, brute, false);
}

}  // namespace mcslam::geometry

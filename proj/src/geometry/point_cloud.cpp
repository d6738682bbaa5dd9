#include "mcslam/geometry/point_cloud.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_set>

namespace mcslam::geometry {

bool PointCloud2::is_valid() const {
  if (!normals.empty() && normals.size() != points.size()) return false;
  for (const auto& p : points) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) return false;
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!has_normal(i)) continue;
    if (std::abs(normals[i].norm() - 1.0) > 1e-9) return false;
  }
  return true;
}

bool operator==(const PointCloud2& a, const PointCloud2& b) {
  return a.points == b.points && a.normals == b.normals;
}

PointCloud2 transform_cloud(const Pose2& pose, const PointCloud2& cloud) {
  PointCloud2 out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(transform_point(pose, p));
  out.normals.reserve(cloud.normals.size());
  for (const auto& n : cloud.normals) {
    // zero stays zero: rotation preserves the "no normal" marker
    out.normals.push_back(rotate(pose, n));
  }
  return out;
}

namespace {

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const noexcept {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(c.first) * 0x9E3779B97F4A7C15ull ^
                                    static_cast<std::uint64_t>(c.second));
  }
};

}  // namespace

PointCloud2 voxel_decimate(const PointCloud2& cloud, double resolution, std::size_t max_points) {
  PointCloud2 out;
  out.reserve(cloud.size());
  std::unordered_set<std::pair<std::int64_t, std::int64_t>, CellHash> occupied;
  occupied.reserve(cloud.size() * 2);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (max_points != 0 && out.size() >= max_points) break;
    const auto& p = cloud.points[i];
    const std::pair<std::int64_t, std::int64_t> cell{
        static_cast<std::int64_t>(std::floor(p.x() / resolution)),
        static_cast<std::int64_t>(std::floor(p.y() / resolution))};
    if (!occupied.insert(cell).second) continue;
    out.points.push_back(p);
    if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
  }
  return out;
}

void append(PointCloud2& cloud, const PointCloud2& extra) {
  const bool keep_normals = cloud.has_normals() || extra.has_normals();
  if (keep_normals && !cloud.has_normals()) cloud.normals.assign(cloud.size(), Vector2::Zero());
  cloud.points.insert(cloud.points.end(), extra.points.begin(), extra.points.end());
  if (!keep_normals) return;
  if (extra.has_normals()) {
    cloud.normals.insert(cloud.normals.end(), extra.normals.begin(), extra.normals.end());
  } else {
    cloud.normals.resize(cloud.points.size(), Vector2::Zero());
  }
}

}  // namespace mcslam::geometry

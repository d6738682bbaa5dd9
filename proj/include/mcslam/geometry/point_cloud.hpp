#pragma once

#include <cstddef>
#include <vector>

#include "mcslam/geometry/pose2.hpp"

namespace mcslam::geometry {

/// 2D points with optional per-point unit normals.
///
/// `normals` is either empty (cloud carries no normals) or has one entry per
/// point. A zero vector marks a point whose normal could not be estimated.
struct PointCloud2 {
  std::vector<Vector2> points;
  std::vector<Vector2> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_normal(std::size_t i) const {
    return has_normals() && (normals[i].x() != 0.0 || normals[i].y() != 0.0);
  }

  void push_back(const Vector2& p) { points.push_back(p); }
  void push_back(const Vector2& p, const Vector2& n) {
    points.push_back(p);
    normals.push_back(n);
  }
  void reserve(std::size_t n) {
    points.reserve(n);
    normals.reserve(n);
  }

  /// Checks finiteness, matching lengths and unit normals (within 1e-9).
  bool is_valid() const;

  friend bool operator==(const PointCloud2& a, const PointCloud2& b);
};

/// Applies `pose` to every point and rotates every normal.
PointCloud2 transform_cloud(const Pose2& pose, const PointCloud2& cloud);

/// Keeps the first point that lands in each `resolution`-sized cell, in input
/// order, stopping at `max_points` when non-zero.
PointCloud2 voxel_decimate(const PointCloud2& cloud, double resolution, std::size_t max_points = 0);

/// Appends `extra` to `cloud`; normals are padded with zero vectors when only
/// one side carries them.
void append(PointCloud2& cloud, const PointCloud2& extra);

}  // namespace mcslam::geometry

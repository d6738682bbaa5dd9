#pragma once

#include <cstddef>
#include <vector>

#include "mcslam/geometry/point_cloud.hpp"

namespace mcslam::geometry {

struct NormalEstimate {
  PointCloud2 cloud;
  /// Points whose k-neighborhood was too sparse; their normal is zero.
  std::vector<std::size_t> flagged;
};

/// Normal of each point = minor eigenvector of the covariance of its k nearest
/// neighbors (the point included), oriented toward the frame origin. A point
/// is flagged when its k-th neighbor lies beyond 10x the median
/// nearest-neighbor spacing, or when the cloud has fewer than k points.
NormalEstimate estimate_normals(const PointCloud2& cloud, std::size_t k);

/// Same contract with exhaustive neighbor search, serial. Test reference.
NormalEstimate estimate_normals_reference(const PointCloud2& cloud, std::size_t k);

}  // namespace mcslam::geometry

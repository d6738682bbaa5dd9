#pragma once

#include <cstddef>
#include <vector>

#include "mcslam/geometry/kd_tree.hpp"
#include "mcslam/geometry/point_cloud.hpp"

namespace mcslam::geometry {

struct Correspondence {
  std::size_t fixed_index = 0;
  std::size_t moving_index = 0;
  double distance = 0.0;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct CorrespondenceGates {
  double distance = 0.5;      // meters
  double normal_angle = 0.5;  // radians
};

/// Data association against a fixed cloud. The index is built once and
/// reused across calls (one aligner run queries it every outer iteration).
///
/// For each moving point p the nearest fixed point to guess * p within the
/// distance gate is chosen, lowest index on ties. The pair is dropped when
/// both points carry normals and they differ by more than the angle gate.
/// Output is ordered by moving index.
class CorrespondenceFinder {
 public:
  explicit CorrespondenceFinder(const PointCloud2& fixed);

  std::vector<Correspondence> find(const PointCloud2& moving, const Pose2& guess,
                                   const CorrespondenceGates& gates) const;

  const PointCloud2& fixed() const { return fixed_; }

 private:
  const PointCloud2& fixed_;
  KdTree tree_;
};

std::vector<Correspondence> find_correspondences(const PointCloud2& fixed, const PointCloud2& moving,
                                                 const Pose2& guess, const CorrespondenceGates& gates);

/// Exhaustive O(n*m) scan with the same contract. Test reference.
std::vector<Correspondence> find_correspondences_reference(const PointCloud2& fixed,
                                                           const PointCloud2& moving, const Pose2& guess,
                                                           const CorrespondenceGates& gates);

}  // namespace mcslam::geometry

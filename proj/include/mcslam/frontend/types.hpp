#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcslam/core/property.hpp"
#include "mcslam/geometry/point_cloud.hpp"
#include "mcslam/geometry/pose2.hpp"

namespace mcslam::frontend {

using geometry::PointCloud2;
using geometry::Pose2;
using geometry::StampedPose;
using geometry::Vector2;

/// Cue name of the relative odometry motion inside a measurement packet.
inline constexpr std::string_view kOdomCue = "odom_delta";

struct LaserScan {
  double timestamp = 0.0;
  std::string topic;
  double angle_min = 0.0;
  double angle_increment = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;
  std::vector<double> ranges;  // non-finite = no return

  bool is_valid() const { return angle_increment > 0.0 && range_min < range_max; }
  friend bool operator==(const LaserScan&, const LaserScan&) = default;
};

struct OdometryReading {
  double timestamp = 0.0;
  Pose2 pose;  // integrated wheel odometry, odom frame

  friend bool operator==(const OdometryReading&, const OdometryReading&) = default;
};

struct SensorExtrinsics {
  std::string topic;
  Pose2 sensor_in_base;
};

/// All cues of one processing step: point clouds keyed by scan topic (robot
/// base frame) and the odometry delta keyed kOdomCue.
struct MeasurementPacket {
  double timestamp = 0.0;
  core::PropertyContainer cues;
};

struct LocalMap {
  std::int64_t id = 0;
  Pose2 origin;                     // world frame, as tracked
  core::PropertyContainer scene;    // per-cue clouds, local-map frame
  std::vector<StampedPose> trajectory;  // local-map frame, first pose identity

  friend bool operator==(const LocalMap&, const LocalMap&) = default;
};

}  // namespace mcslam::frontend

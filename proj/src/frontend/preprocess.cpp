#include "mcslam/frontend/preprocess.hpp"

#include <cmath>

#include "mcslam/geometry/normals.hpp"

namespace mcslam::frontend {

PointCloud2 preprocess_scan(const LaserScan& scan, const SensorExtrinsics& extrinsics,
                            const ScanPreprocessSettings& settings) {
  PointCloud2 sensor;
  sensor.points.reserve(scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (!std::isfinite(r) || r < scan.range_min || r > scan.range_max) continue;
    const double a = scan.angle_min + static_cast<double>(i) * scan.angle_increment;
    sensor.push_back({r * std::cos(a), r * std::sin(a)});
  }
  if (sensor.empty()) return sensor;
  const auto est = geometry::estimate_normals(sensor, settings.normal_neighbors);
  const PointCloud2 base = geometry::transform_cloud(extrinsics.sensor_in_base, est.cloud);
  return settings.voxel_resolution > 0.0 ? geometry::voxel_decimate(base, settings.voxel_resolution) : base;
}

Pose2 preprocess_odometry(const OdometryReading& prev, const OdometryReading& cur) {
  return geometry::between(prev.pose, cur.pose);
}

void Lidar2DPreprocessor::configure() {
  extrinsics_.topic = param<std::string>("topic");
  extrinsics_.sensor_in_base = param<Pose2>("sensor_in_base");
  settings_.voxel_resolution = param<double>("voxel_resolution");
  const auto k = param<std::int64_t>("normal_neighbors");
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "normal_neighbors must be >= 2");
  settings_.normal_neighbors = static_cast<std::size_t>(k);
}

void Lidar2DPreprocessor::process(const RawPacket& raw, MeasurementPacket& packet) {
  for (const auto& scan : raw.scans) {
    if (scan.topic == extrinsics_.topic) {
      packet.cues.set(extrinsics_.topic, preprocess_scan(scan, extrinsics_, settings_));
      return;
    }
  }
}

void OdometryPreprocessor::process(const RawPacket& raw, MeasurementPacket& packet) {
  if (!raw.odometry) {
    previous_.reset();
    return;
  }
  if (previous_) packet.cues.set(kOdomCue, preprocess_odometry(*previous_, *raw.odometry));
  previous_ = raw.odometry;
}

}  // namespace mcslam::frontend

#pragma once

#include <optional>

#include "mcslam/config/configurable.hpp"
#include "mcslam/frontend/dataset.hpp"
#include "mcslam/frontend/types.hpp"

namespace mcslam::frontend {

struct ScanPreprocessSettings {
  double voxel_resolution = 0.025;
  std::size_t normal_neighbors = 8;
};

/// Polar to Cartesian in the robot base frame. Returns outside
/// [range_min, range_max] and non-finite ranges are dropped. Normals are
/// estimated in the sensor frame (so they face the sensor) before the
/// extrinsics are applied, then the cloud is voxel-decimated.
PointCloud2 preprocess_scan(const LaserScan& scan, const SensorExtrinsics& extrinsics,
                            const ScanPreprocessSettings& settings = {});

/// Relative motion inverse(prev.pose) * cur.pose in the base frame.
Pose2 preprocess_odometry(const OdometryReading& prev, const OdometryReading& cur);

/// Turns one raw packet's data for one sensor into a cue.
class Preprocessor : public config::Configurable {
 public:
  virtual void reset() {}
  virtual void process(const RawPacket& raw, MeasurementPacket& packet) = 0;
};

/// Params: topic, sensor_in_base, voxel_resolution, normal_neighbors.
/// The cue is named after the topic.
class Lidar2DPreprocessor : public Preprocessor {
 public:
  void configure() override;
  void process(const RawPacket& raw, MeasurementPacket& packet) override;

  const SensorExtrinsics& extrinsics() const { return extrinsics_; }

 private:
  SensorExtrinsics extrinsics_;
  ScanPreprocessSettings settings_;
};

/// Emits kOdomCue: the odometry motion since the previous packet. Packets
/// without odometry reset the chain.
class OdometryPreprocessor : public Preprocessor {
 public:
  void reset() override { previous_.reset(); }
  void process(const RawPacket& raw, MeasurementPacket& packet) override;

 private:
  std::optional<OdometryReading> previous_;
};

}  // namespace mcslam::frontend

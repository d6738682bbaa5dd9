#pragma once

#include <optional>

#include "mcslam/config/configurable.hpp"
#include "mcslam/frontend/aligner.hpp"
#include "mcslam/frontend/types.hpp"

namespace mcslam::frontend {

struct SplitThresholds {
  double translation = 1.0;  // meters
  double rotation = 0.5;     // radians
};

/// True iff |translation| > t_trans or |theta| > t_rot.
bool should_split(const Pose2& pose_in_map, const SplitThresholds& thresholds);

/// Per-cue sub-clouds holding exactly the scene points within `radius` of
/// the pose's translation. Non-cloud cues are dropped.
core::PropertyContainer clip(const LocalMap& map, const Pose2& pose_in_map, double radius);

struct MergeSettings {
  double resolution = 0.05;
  std::size_t max_points = 20000;
};

/// Transforms `cue` (base frame) by `pose_in_map`, appends it to `scene` and
/// voxel-decimates the result, first inserted point winning, up to the cap.
PointCloud2 merge_cloud(const PointCloud2& scene, const PointCloud2& cue, const Pose2& pose_in_map,
                        const MergeSettings& settings);

/// Params: resolution, max_points.
class PointCloudMerger : public config::Configurable {
 public:
  void configure() override;
  const MergeSettings& settings() const { return settings_; }

 private:
  MergeSettings settings_;
};

/// Params: radius.
class MapClipper : public config::Configurable {
 public:
  void configure() override;
  core::PropertyContainer clip(const LocalMap& map, const Pose2& pose_in_map) const;

 private:
  double radius_ = 10.0;
};

/// Params: max_translation, max_rotation.
class LocalMapSplitter : public config::Configurable {
 public:
  void configure() override;
  bool should_split(const Pose2& pose_in_map) const { return frontend::should_split(pose_in_map, thresholds_); }

 private:
  SplitThresholds thresholds_;
};

/// Handles one cue inside the Multi-Tracker.
class TrackerSlice : public config::Configurable {
 public:
  const std::string& cue() const { return cue_; }
  /// Folds this slice's cue of `packet` into the map scene at `pose_in_map`.
  virtual void merge(LocalMap& map, const MeasurementPacket& packet, const Pose2& pose_in_map) const = 0;

 protected:
  std::string cue_;
};

/// Params: cue. Slot: merger.
class Lidar2DTrackerSlice : public TrackerSlice {
 public:
  void configure() override;
  void merge(LocalMap& map, const MeasurementPacket& packet, const Pose2& pose_in_map) const override;

 private:
  PointCloudMerger* merger_ = nullptr;
};

/// Every slice merges its cue; the trajectory is left untouched.
void merge(LocalMap& map, const MeasurementPacket& packet, const Pose2& pose_in_map,
           const std::vector<TrackerSlice*>& slices);

struct TrackerEvent {
  double timestamp = 0.0;
  std::int64_t map_id = 0;
  Pose2 pose_in_map;
  bool degenerate = false;  // alignment failed; pose from odometry, nothing merged
  AlignStats stats;
  /// Set when this packet started a new local map: the finished map and the
  /// pose of the new map's origin in the finished map's frame.
  std::optional<LocalMap> finished_map;
  Pose2 closing_relative;
};

/// Local-map state machine.
///
/// Slots: aligner, slices (list), clipper, splitter.
class MultiTracker : public config::Configurable {
 public:
  void configure() override;
  void reset();

  TrackerEvent track(const MeasurementPacket& packet);

  bool started() const { return started_; }
  const LocalMap& current_map() const { return map_; }
  const Pose2& pose_in_map() const { return pose_; }
  MultiAligner& aligner() const { return *aligner_; }

 private:
  void start_map(const MeasurementPacket& packet, std::int64_t id, const Pose2& origin);

  MultiAligner* aligner_ = nullptr;
  std::vector<TrackerSlice*> slices_;
  MapClipper* clipper_ = nullptr;
  LocalMapSplitter* splitter_ = nullptr;

  bool started_ = false;
  LocalMap map_;
  Pose2 pose_;
};

}  // namespace mcslam::frontend

#include "mcslam/frontend/tracker.hpp"

#include <cmath>

#include "mcslam/geometry/kd_tree.hpp"

namespace mcslam::frontend {

bool should_split(const Pose2& pose_in_map, const SplitThresholds& thresholds) {
  return pose_in_map.translation().norm() > thresholds.translation || std::abs(pose_in_map.theta) > thresholds.rotation;
}

core::PropertyContainer clip(const LocalMap& map, const Pose2& pose_in_map, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "clip radius must be > 0");
  const Vector2 center = pose_in_map.translation();
  const double r2 = radius * radius;
  core::PropertyContainer out;
  for (const auto& p : map.scene) {
    const auto* cloud = std::get_if<PointCloud2>(&p.value);
    if (cloud == nullptr) continue;
    PointCloud2 sub;
    for (std::size_t i = 0; i < cloud->size(); ++i) {
      if (geometry::squared_distance(cloud->points[i], center) > r2) continue;
      if (cloud->has_normals()) {
        sub.push_back(cloud->points[i], cloud->normals[i]);
      } else {
        sub.push_back(cloud->points[i]);
      }
    }
    out.set(p.name, std::move(sub));
  }
  return out;
}

PointCloud2 merge_cloud(const PointCloud2& scene, const PointCloud2& cue, const Pose2& pose_in_map,
                        const MergeSettings& settings) {
  PointCloud2 merged = scene;
  geometry::append(merged, geometry::transform_cloud(pose_in_map, cue));
  return geometry::voxel_decimate(merged, settings.resolution, settings.max_points);
}

void PointCloudMerger::configure() {
  settings_.resolution = param<double>("resolution");
  const auto cap = param<std::int64_t>("max_points");
  if (!(settings_.resolution > 0.0) || cap < 1) {
    throw Error(ErrorCode::InvalidArgument, "PointCloudMerger needs resolution > 0 and max_points >= 1");
  }
  settings_.max_points = static_cast<std::size_t>(cap);
}

void MapClipper::configure() {
  radius_ = param<double>("radius");
  if (!(radius_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "MapClipper radius must be > 0");
}

core::PropertyContainer MapClipper::clip(const LocalMap& map, const Pose2& pose_in_map) const {
  return frontend::clip(map, pose_in_map, radius_);
}

void LocalMapSplitter::configure() {
  thresholds_.translation = param<double>("max_translation");
  thresholds_.rotation = param<double>("max_rotation");
}

void Lidar2DTrackerSlice::configure() {
  cue_ = param<std::string>("cue");
  merger_ = slot_as<PointCloudMerger>("merger");
}

void Lidar2DTrackerSlice::merge(LocalMap& map, const MeasurementPacket& packet, const Pose2& pose_in_map) const {
  const auto* value = packet.cues.find(cue_);
  if (value == nullptr) return;
  const auto* cloud = std::get_if<PointCloud2>(value);
  if (cloud == nullptr) throw Error(ErrorCode::KindMismatch, "cue '" + cue_ + "' is not a point cloud");
  const auto* existing = map.scene.find(cue_);
  const PointCloud2 empty;
  const PointCloud2& scene = existing == nullptr ? empty : std::get<PointCloud2>(*existing);
  map.scene.set(cue_, merge_cloud(scene, *cloud, pose_in_map, merger_->settings()));
}

void merge(LocalMap& map, const MeasurementPacket& packet, const Pose2& pose_in_map,
           const std::vector<TrackerSlice*>& slices) {
  if (!pose_in_map.is_finite()) throw Error(ErrorCode::InvalidArgument, "merge pose must be finite");
  for (const auto* s : slices) s->merge(map, packet, pose_in_map);
}

// ---------------------------------------------------------------- MultiTracker

void MultiTracker::configure() {
  aligner_ = slot_as<MultiAligner>("aligner");
  slices_ = slot_list_as<TrackerSlice>("slices");
  clipper_ = slot_as<MapClipper>("clipper");
  splitter_ = slot_as<LocalMapSplitter>("splitter");
  reset();
}

void MultiTracker::reset() {
  started_ = false;
  map_ = LocalMap{};
  pose_ = Pose2::identity();
}

void MultiTracker::start_map(const MeasurementPacket& packet, std::int64_t id, const Pose2& origin) {
  map_ = LocalMap{};
  map_.id = id;
  map_.origin = origin;
  pose_ = Pose2::identity();
  merge(map_, packet, pose_, slices_);
  map_.trajectory.push_back({packet.timestamp, pose_});
}

TrackerEvent MultiTracker::track(const MeasurementPacket& packet) {
  TrackerEvent event;
  event.timestamp = packet.timestamp;
  if (!started_) {
    started_ = true;
    start_map(packet, 0, Pose2::identity());
    event.map_id = map_.id;
    event.pose_in_map = pose_;
    return event;
  }

  Pose2 guess = pose_;
  if (const auto* odom = packet.cues.find(kOdomCue)) guess = compose(pose_, std::get<Pose2>(*odom));

  Pose2 estimate = guess;
  try {
    const auto fixed = clipper_->clip(map_, guess);
    const AlignResult r = aligner_->align(fixed, packet, guess);
    estimate = r.pose;
    event.stats = r.stats;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateAlignment) throw;
    event.degenerate = true;
  }

  if (splitter_->should_split(estimate)) {
    event.finished_map = std::move(map_);
    event.closing_relative = estimate;
    start_map(packet, event.finished_map->id + 1, compose(event.finished_map->origin, estimate));
  } else {
    pose_ = estimate;
    if (!event.degenerate) merge(map_, packet, pose_, slices_);
    map_.trajectory.push_back({packet.timestamp, pose_});
  }
  event.map_id = map_.id;
  event.pose_in_map = pose_;
  return event;
}

}  // namespace mcslam::frontend

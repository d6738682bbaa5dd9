#pragma once

// World file: JSON-lines, one wall per line {"x1":..,"y1":..,"x2":..,"y2":..}.
// Path file: JSON-lines; an optional first line {"start":[x,y,theta]}, then
//   one command per line {"v":..,"omega":..,"duration":..}.
// Robot file: one JSON object
//   {"rate":10,"radius":0.2,
//    "odom_noise":{"xy_per_m":0.02,"theta_per_rad":0.02,"theta_per_m":0.005},
//    "sensors":[{"topic":"front_scan","mount":[x,y,theta],"beam_count":181,
//                "fov":3.14159,"range_min":0.05,"range_max":10,"sigma_range":0.01}]}
//
// Random numbers: std::mt19937_64 seeded with the seed; each normal draw
// consumes two 64-bit outputs u, v and returns
//   sqrt(-2 ln(((u >> 11) + 1) * 2^-53)) * cos(2 pi (v >> 11) * 2^-53).
// Draw order per tick: every beam of every sensor in sensor order, then the
// odometry x, y, theta noise (ticks after the first).

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mcslam/frontend/dataset.hpp"
#include "mcslam/geometry/pose2.hpp"

namespace mcslam::sim {

using geometry::Pose2;
using geometry::StampedPose;
using geometry::Vector2;

struct Segment {
  Vector2 a;
  Vector2 b;
};

struct World {
  std::vector<Segment> segments;

  /// InvalidArgument for an empty world or non-finite endpoints.
  void validate() const;
  double distance_to(const Vector2& p) const;
};

struct SensorModel {
  frontend::SensorExtrinsics extrinsics;
  int beam_count = 181;
  double fov = 3.141592653589793;
  double range_min = 0.05;
  double range_max = 10.0;
  double sigma_range = 0.01;
};

struct OdometryNoise {
  double xy_per_m = 0.02;
  double theta_per_rad = 0.02;
  double theta_per_m = 0.005;

  bool zero() const { return xy_per_m == 0.0 && theta_per_rad == 0.0 && theta_per_m == 0.0; }
};

struct RobotModel {
  std::vector<SensorModel> sensors;
  OdometryNoise odom_noise;
  double rate = 10.0;    // Hz
  double radius = 0.2;  // clearance required at the start pose

  /// InvalidArgument unless rate > 0, beam_count >= 2, fov > 0 and
  /// 0 <= range_min < range_max for every sensor.
  void validate() const;
};

struct PathStep {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s
  double duration = 0.0;
};

struct PathCommand {
  Pose2 start;
  std::vector<PathStep> steps;

  double duration() const;
  void validate() const;
};

/// Exact arc integration of the unicycle model. InvalidArgument unless dt > 0.
Pose2 step_unicycle(const Pose2& pose, double v, double omega, double dt);

/// Pose reached after `t` seconds of the path (clamped to its end).
Pose2 pose_at(const PathCommand& path, double t);

/// Nearest positive hit along the ray within range_max, +infinity on a miss.
double ray_cast(const World& world, const Vector2& origin, double direction, double range_max);

/// One ray per direction. OpenMP across rays.
std::vector<double> cast_rays(const World& world, const Vector2& origin, const std::vector<double>& directions,
                              double range_max);
/// Serial reference of cast_rays.
std::vector<double> cast_rays_reference(const World& world, const Vector2& origin,
                                        const std::vector<double>& directions, double range_max);

/// Gaussian draws as documented above.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  std::mt19937_64 engine_;
};

struct SimulationOutput {
  std::vector<frontend::DatasetRecord> records;
  std::vector<StampedPose> ground_truth;  // at primary-scan times
};

/// Ticks k = 0..round(duration * rate) at t_k = k / rate. Each tick emits an
/// odometry reading at t_k and sensor i's scan at t_k + (i + 1) ms, cast from
/// the true pose at that time. Ground truth is sampled at sensor 0's times.
/// With zero odometry noise the odometry poses are the ground-truth poses.
/// SpawnInWall when the start pose is within `radius` of a wall.
SimulationOutput simulate(const World& world, const RobotModel& robot, const PathCommand& path, std::uint64_t seed);

// ---------------------------------------------------------------- files

World parse_world(std::string_view text);
std::string format_world(const World& world);
PathCommand parse_path(std::string_view text);
std::string format_path(const PathCommand& path);
RobotModel parse_robot(std::string_view text);
std::string format_robot(const RobotModel& robot);

// ---------------------------------------------------------------- built-ins

/// "box", "office", "corridor", "two_rooms". InvalidArgument otherwise.
World builtin_world(std::string_view name);
/// Default path through the named world.
PathCommand builtin_path(std::string_view name);
std::vector<std::string> builtin_world_names();

/// Front and rear rangefinders matching the pipeline presets. With
/// `noisy` false every sigma is zero.
RobotModel default_robot(bool noisy = true);

}  // namespace mcslam::sim

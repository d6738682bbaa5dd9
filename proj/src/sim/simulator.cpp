#include "mcslam/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "mcslam/core/error.hpp"

namespace mcslam::sim {

using frontend::LaserScan;
using frontend::OdometryReading;
using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_segment_distance(const Vector2& p, const Segment& s) {
  const Vector2 d = s.b - s.a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - s.a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (s.a + t * d - p).norm();
}

// Distance along the ray to the segment, +inf when they do not meet ahead.
double intersect(const Vector2& o, const Vector2& dir, const Segment& s) {
  const Vector2 e = s.b - s.a;
  const double denom = dir.x() * e.y() - dir.y() * e.x();
  if (denom == 0.0) return kInf;
  const Vector2 w = s.a - o;
  const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
  const double u = (w.x() * dir.y() - w.y() * dir.x()) / denom;
  if (t <= 0.0 || u < 0.0 || u > 1.0) return kInf;
  return t;
}

}  // namespace

void World::validate() const {
  if (segments.empty()) throw Error(ErrorCode::InvalidArgument, "world needs at least one segment");
  for (const auto& s : segments) {
    if (!s.a.allFinite() || !s.b.allFinite()) throw Error(ErrorCode::InvalidArgument, "world segment not finite");
  }
}

double World::distance_to(const Vector2& p) const {
  double best = kInf;
  for (const auto& s : segments) best = std::min(best, point_segment_distance(p, s));
  return best;
}

void RobotModel::validate() const {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "robot rate must be > 0");
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "robot radius must be >= 0");
  for (const auto& s : sensors) {
    if (s.beam_count < 2 || !(s.fov > 0.0) || !(s.range_min >= 0.0) || !(s.range_min < s.range_max) ||
        !(s.sigma_range >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "sensor '" + s.extrinsics.topic + "' has invalid parameters");
    }
  }
  const auto& n = odom_noise;
  if (!(n.xy_per_m >= 0.0 && n.theta_per_rad >= 0.0 && n.theta_per_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "odometry noise must be >= 0");
  }
}

double PathCommand::duration() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration;
  return t;
}

void PathCommand::validate() const {
  if (!start.is_finite()) throw Error(ErrorCode::InvalidArgument, "path start must be finite");
  for (const auto& s : steps) {
    if (!(s.duration > 0.0) || !std::isfinite(s.v) || !std::isfinite(s.omega)) {
      throw Error(ErrorCode::InvalidArgument, "path commands need finite v, omega and duration > 0");
    }
  }
}

Pose2 step_unicycle(const Pose2& pose, double v, double omega, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_unicycle needs dt > 0");
  if (std::abs(omega) < 1e-9) {
    return {pose.x + v * dt * std::cos(pose.theta), pose.y + v * dt * std::sin(pose.theta), pose.theta};
  }
  const double th = pose.theta + omega * dt;
  const double r = v / omega;
  return {pose.x + r * (std::sin(th) - std::sin(pose.theta)), pose.y + r * (std::cos(pose.theta) - std::cos(th)),
          th};
}

Pose2 pose_at(const PathCommand& path, double t) {
  Pose2 pose = path.start;
  for (const auto& s : path.steps) {
    if (t <= 0.0) break;
    const double dt = std::min(t, s.duration);
    pose = step_unicycle(pose, s.v, s.omega, dt);
    t -= dt;
  }
  return pose;
}

double ray_cast(const World& world, const Vector2& origin, double direction, double range_max) {
  const Vector2 dir(std::cos(direction), std::sin(direction));
  double best = kInf;
  for (const auto& s : world.segments) best = std::min(best, intersect(origin, dir, s));
  return best <= range_max ? best : kInf;
}

std::vector<double> cast_rays(const World& world, const Vector2& origin, const std::vector<double>& directions,
                              double range_max) {
  const auto n = static_cast<std::ptrdiff_t>(directions.size());
  std::vector<double> out(directions.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = ray_cast(world, origin, directions[i], range_max);
  return out;
}

std::vector<double> cast_rays_reference(const World& world, const Vector2& origin,
                                        const std::vector<double>& directions, double range_max) {
  std::vector<double> out;
  out.reserve(directions.size());
  for (const double d : directions) out.push_back(ray_cast(world, origin, d, range_max));
  return out;
}

double NormalSampler::operator()() {
  constexpr double kScale = 0x1.0p-53;
  const double u = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double v = static_cast<double>(engine_() >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

SimulationOutput simulate(const World& world, const RobotModel& robot, const PathCommand& path,
                          std::uint64_t seed) {
  world.validate();
  robot.validate();
  path.validate();
  if (robot.sensors.empty()) throw Error(ErrorCode::InvalidArgument, "robot needs at least one sensor");
  if (world.distance_to(path.start.translation()) < robot.radius) {
    throw Error(ErrorCode::SpawnInWall, "start pose lies within the robot radius of a wall");
  }

  NormalSampler normal(seed);
  SimulationOutput out;
  const auto ticks = static_cast<std::int64_t>(std::llround(path.duration() * robot.rate));
  const bool exact_odometry = robot.odom_noise.zero();
  Pose2 previous_truth = path.start;
  Pose2 odometry = path.start;

  for (std::int64_t k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) / robot.rate;
    const Pose2 truth = pose_at(path, t);

    std::vector<LaserScan> scans;
    for (std::size_t i = 0; i < robot.sensors.size(); ++i) {
      const auto& sensor = robot.sensors[i];
      const double ts = t + 0.001 * static_cast<double>(i + 1);
      const Pose2 base = pose_at(path, ts);
      if (i == 0) out.ground_truth.push_back({ts, base});
      const Pose2 mount = compose(base, sensor.extrinsics.sensor_in_base);

      LaserScan scan;
      scan.timestamp = ts;
      scan.topic = sensor.extrinsics.topic;
      scan.angle_min = -0.5 * sensor.fov;
      scan.angle_increment = sensor.fov / static_cast<double>(sensor.beam_count - 1);
      scan.range_min = sensor.range_min;
      scan.range_max = sensor.range_max;
      std::vector<double> directions(static_cast<std::size_t>(sensor.beam_count));
      for (int b = 0; b < sensor.beam_count; ++b) {
        directions[b] = mount.theta + scan.angle_min + b * scan.angle_increment;
      }
      scan.ranges = cast_rays(world, mount.translation(), directions, sensor.range_max);
      for (auto& r : scan.ranges) {
        const double noisy = r + sensor.sigma_range * normal();
        r = std::isfinite(r) && noisy >= sensor.range_min && noisy <= sensor.range_max ? noisy : kInf;
      }
      scans.push_back(std::move(scan));
    }

    if (k > 0) {
      const Pose2 delta = geometry::between(previous_truth, truth);
      const double dist = delta.translation().norm();
      const auto& n = robot.odom_noise;
      const double sx = n.xy_per_m * dist;
      const double st = n.theta_per_rad * std::abs(delta.theta) + n.theta_per_m * dist;
      const double ex = sx * normal();
      const double ey = sx * normal();
      const double et = st * normal();
      odometry = exact_odometry ? truth : compose(odometry, Pose2(delta.x + ex, delta.y + ey, delta.theta + et));
    }
    previous_truth = truth;
    out.records.emplace_back(OdometryReading{t, odometry});
    for (auto& s : scans) out.records.emplace_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- files

namespace {

ordered_json parse_line(std::string_view line, std::size_t number, const char* what) {
  try {
    auto j = ordered_json::parse(line);
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "not an object");
    return j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + " line " + std::to_string(number) + ": " + e.what());
  }
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const auto line = text.substr(0, end);
    ++number;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) f(line, number);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

double number(const ordered_json& j, const char* key, const char* what, std::size_t line) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(ErrorCode::ParseError,
                std::string(what) + " line " + std::to_string(line) + ": missing number '" + key + "'");
  }
  return j[key].get<double>();
}

Pose2 pose_from(const ordered_json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    throw Error(ErrorCode::ParseError, std::string(what) + " needs [x, y, theta]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json pose_json(const Pose2& p) { return ordered_json::array({p.x, p.y, p.theta}); }

}  // namespace

World parse_world(std::string_view text) {
  World w;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    const auto j = parse_line(line, n, "world");
    w.segments.push_back({{number(j, "x1", "world", n), number(j, "y1", "world", n)},
                          {number(j, "x2", "world", n), number(j, "y2", "world", n)}});
  });
  w.validate();
  return w;
}

std::string format_world(const World& world) {
  std::string out;
  for (const auto& s : world.segments) {
    ordered_json j;
    j["x1"] = s.a.x();
    j["y1"] = s.a.y();
    j["x2"] = s.b.x();
    j["y2"] = s.b.y();
    out += j.dump() + '\n';
  }
  return out;
}

PathCommand parse_path(std::string_view text) {
  PathCommand p;
  for_each_line(text, [&](std::string_view line, std::size_t n) {
    const auto j = parse_line(line, n, "path");
    if (j.contains("start")) {
      if (!p.steps.empty()) throw Error(ErrorCode::ParseError, "path line " + std::to_string(n) + ": start must come first");
      p.start = pose_from(j["start"], "path start");
      return;
    }
    p.steps.push_back({number(j, "v", "path", n), number(j, "omega", "path", n), number(j, "duration", "path", n)});
  });
  p.validate();
  return p;
}

std::string format_path(const PathCommand& path) {
  std::string out = ordered_json{{"start", pose_json(path.start)}}.dump() + '\n';
  for (const auto& s : path.steps) {
    ordered_json j;
    j["v"] = s.v;
    j["omega"] = s.omega;
    j["duration"] = s.duration;
    out += j.dump() + '\n';
  }
  return out;
}

RobotModel parse_robot(std::string_view text) {
  RobotModel r;
  try {
    const auto j = ordered_json::parse(text);
    r.rate = j.value("rate", r.rate);
    r.radius = j.value("radius", r.radius);
    if (j.contains("odom_noise")) {
      const auto& n = j["odom_noise"];
      r.odom_noise.xy_per_m = n.value("xy_per_m", r.odom_noise.xy_per_m);
      r.odom_noise.theta_per_rad = n.value("theta_per_rad", r.odom_noise.theta_per_rad);
      r.odom_noise.theta_per_m = n.value("theta_per_m", r.odom_noise.theta_per_m);
    }
    for (const auto& s : j.at("sensors")) {
      SensorModel m;
      m.extrinsics.topic = s.at("topic").get<std::string>();
      if (s.contains("mount")) m.extrinsics.sensor_in_base = pose_from(s["mount"], "sensor mount");
      m.beam_count = s.value("beam_count", m.beam_count);
      m.fov = s.value("fov", m.fov);
      m.range_min = s.value("range_min", m.range_min);
      m.range_max = s.value("range_max", m.range_max);
      m.sigma_range = s.value("sigma_range", m.sigma_range);
      r.sensors.push_back(std::move(m));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("robot file: ") + e.what());
  }
  r.validate();
  return r;
}

std::string format_robot(const RobotModel& robot) {
  ordered_json j;
  j["rate"] = robot.rate;
  j["radius"] = robot.radius;
  j["odom_noise"] = {{"xy_per_m", robot.odom_noise.xy_per_m},
                     {"theta_per_rad", robot.odom_noise.theta_per_rad},
                     {"theta_per_m", robot.odom_noise.theta_per_m}};
  j["sensors"] = ordered_json::array();
  for (const auto& s : robot.sensors) {
    ordered_json m;
    m["topic"] = s.extrinsics.topic;
    m["mount"] = pose_json(s.extrinsics.sensor_in_base);
    m["beam_count"] = s.beam_count;
    m["fov"] = s.fov;
    m["range_min"] = s.range_min;
    m["range_max"] = s.range_max;
    m["sigma_range"] = s.sigma_range;
    j["sensors"].push_back(std::move(m));
  }
  return j.dump(2) + '\n';
}

}  // namespace mcslam::sim

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcslam/core/error.hpp"
#include "mcslam/frontend/aligner.hpp"
#include "mcslam/frontend/dataset.hpp"
#include "mcslam/frontend/preprocess.hpp"
#include "mcslam/frontend/tracker.hpp"
#include "mcslam/pipeline/builtins.hpp"
#include "mcslam/pipeline/pipeline.hpp"
#include "mcslam/sim/simulator.hpp"
#include "test_support.hpp"

using namespace mcslam;
using namespace mcslam::frontend;
using mcslam::testing::uniform;
using std::numbers::pi;

namespace {

LaserScan make_scan(double t, std::vector<double> ranges) {
  LaserScan s;
  s.timestamp = t;
  s.topic = "front_scan";
  s.angle_min = -pi / 2;
  s.angle_increment = pi / static_cast<double>(ranges.size() - 1);
  s.range_min = 0.05;
  s.range_max = 10.0;
  s.ranges = std::move(ranges);
  return s;
}

// Points along the walls of an L-shaped room with a pillar, normals pointing
// into the room.
PointCloud2 room_cloud(std::mt19937_64& rng, std::size_t n) {
  struct Wall {
    Vector2 a, b, normal;
  };
  const std::vector<Wall> walls = {
      {{-4, -3}, {4, -3}, {0, 1}},  {{4, -3}, {4, 1}, {-1, 0}},  {{4, 1}, {1, 1}, {0, -1}},
      {{1, 1}, {1, 3}, {-1, 0}},    {{1, 3}, {-4, 3}, {0, -1}},  {{-4, 3}, {-4, -3}, {1, 0}},
      {{-1, -1}, {-0.5, -1}, {0, -1}}, {{-0.5, -1}, {-0.5, -0.5}, {1, 0}},
  };
  PointCloud2 c;
  for (std::size_t i = 0; i < n; ++i) {
    const Wall& w = walls[i % walls.size()];
    const double s = uniform(rng, 0.0, 1.0);
    c.push_back(w.a + s * (w.b - w.a), w.normal);
  }
  return c;
}

core::PropertyContainer cues(const PointCloud2& cloud) {
  core::PropertyContainer c;
  c.set("front_scan", cloud);
  return c;
}

frontend::MultiAligner& preset_aligner(const config::ConfigurablePtr& root) {
  return *root->slot("tracker")->slot_as<MultiAligner>("aligner");
}

}  // namespace

TEST_CASE("scan preprocessing drops invalid returns and applies the mount") {
  const auto scan = make_scan(0.0, {2.0, std::numeric_limits<double>::infinity(), 20.0, 0.01, 1.0});
  const SensorExtrinsics ext{"front_scan", {0.2, 0.0, 0.0}};
  const auto cloud = preprocess_scan(scan, ext);
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.points[0].x() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(cloud.points[0].y() == doctest::Approx(-2.0));
  CHECK(cloud.points[1].x() == doctest::Approx(0.2));
  CHECK(cloud.points[1].y() == doctest::Approx(1.0));
  CHECK(cloud.has_normals());

  const SensorExtrinsics rear{"rear_scan", {-0.2, 0.0, pi}};
  const auto back = preprocess_scan(make_scan(0.0, {1.0, 1.0, 1.0}), rear);
  REQUIRE(back.size() == 3);
  CHECK(back.points[1].x() == doctest::Approx(-1.2));
  CHECK(back.points[1].y() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scan normals face the sensor") {
  // flat wall one meter ahead
  std::vector<double> ranges;
  for (int i = 0; i < 61; ++i) {
    const double a = -pi / 4 + i * (pi / 2) / 60.0;
    ranges.push_back(1.0 / std::cos(a));
  }
  LaserScan scan = make_scan(0.0, ranges);
  scan.angle_min = -pi / 4;
  scan.angle_increment = (pi / 2) / 60.0;
  const auto cloud = preprocess_scan(scan, {"front_scan", {}}, {0.0, 8});
  REQUIRE(cloud.size() == 61);
  std::size_t with_normal = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.has_normal(i)) continue;
    ++with_normal;
    CHECK(cloud.normals[i].x() == doctest::Approx(-1.0).epsilon(1e-9));
  }
  // the sparse ends may be flagged
  CHECK(with_normal >= 55);
}

TEST_CASE("odometry preprocessing") {
  const OdometryReading a{0.0, {0, 0, 0}};
  const OdometryReading b{0.1, {1, 0, pi / 2}};
  const Pose2 d = preprocess_odometry(a, b);
  CHECK(d.x == doctest::Approx(1.0));
  CHECK(d.theta == doctest::Approx(pi / 2));
  const Pose2 e = preprocess_odometry({0.0, {1, 1, pi / 2}}, {0.1, {1, 2, pi / 2}});
  CHECK(e.x == doctest::Approx(1.0));
  CHECK(e.y == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.theta == doctest::Approx(0.0));
  const Pose2 z = preprocess_odometry(a, a);
  CHECK(z == Pose2::identity());
}

TEST_CASE("dataset round trip and ordering") {
  std::vector<DatasetRecord> records = {
      OdometryReading{0.0, {0, 0, 0}},
      make_scan(0.001, {1.0, std::numeric_limits<double>::infinity(), 0.5}),
      OdometryReading{0.1, {0.1, 0.0, 0.01}},
      make_scan(0.101, {1.0, 2.0, 0.1 + 0.2}),
  };
  const std::string text = format_dataset(records);
  CHECK(parse_dataset(text) == records);
  CHECK(format_dataset(parse_dataset(text)) == text);

  std::swap(records[2], records[3]);
  std::get<LaserScan>(records[2]).timestamp = 0.05;
  std::get<OdometryReading>(records[3]).timestamp = 0.04;
  try {
    parse_dataset(format_dataset(records));
    FAIL("out-of-order dataset accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  CHECK_THROWS_AS(parse_dataset("{\"type\":\"laser_scan\"}\n"), Error);
}

TEST_CASE("packet assembly") {
  auto front = make_scan(0.101, {1.0, 1.0, 1.0});
  auto rear = make_scan(0.102, {2.0, 2.0, 2.0});
  rear.topic = "rear_scan";
  auto far_rear = make_scan(0.3, {2.0, 2.0, 2.0});
  far_rear.topic = "rear_scan";
  auto front2 = make_scan(0.401, {1.0, 1.0, 1.0});
  const std::vector<DatasetRecord> records = {
      OdometryReading{0.0, {0, 0, 0}}, front, rear, OdometryReading{0.2, {2, 0, pi / 2}}, far_rear, front2,
  };
  const auto packets = assemble_packets(records, {});
  REQUIRE(packets.size() == 2);
  CHECK(packets[0].timestamp == 0.101);
  REQUIRE(packets[0].scans.size() == 2);
  CHECK(packets[0].scans[1].topic == "rear_scan");
  CHECK(packets[0].scans[1].timestamp == 0.102);
  REQUIRE(packets[0].odometry.has_value());
  CHECK(packets[0].odometry->pose.x == doctest::Approx(1.01));
  CHECK(packets[0].odometry->pose.theta == doctest::Approx(0.505 * pi / 2));
  CHECK(packets[1].scans.size() == 1);
  CHECK_FALSE(packets[1].odometry.has_value());

  const Pose2 mid = interpolate_pose({0.0, {0, 0, 3.0}}, {1.0, {0, 0, -3.0}}, 0.5);
  CHECK(std::abs(mid.theta) == doctest::Approx(pi));
}

TEST_CASE("should_split thresholds are strict") {
  const SplitThresholds t{1.0, 0.5};
  CHECK_FALSE(should_split({1.0, 0.0, 0.0}, t));
  CHECK(should_split({1.0 + 1e-9, 0.0, 0.0}, t));
  CHECK_FALSE(should_split({0.0, 0.0, 0.5}, t));
  CHECK(should_split({0.0, 0.0, -0.5001}, t));
}

TEST_CASE("merge and clip") {
  LocalMap map;
  PointCloud2 cue;
  cue.push_back({1.0, 0.0}, {-1.0, 0.0});
  cue.push_back({1.01, 0.0}, {-1.0, 0.0});
  cue.push_back({0.0, 2.0}, {0.0, -1.0});
  const auto merged = merge_cloud({}, cue, {1.0, 1.0, pi / 2}, {0.05, 100});
  REQUIRE(merged.size() == 2);
  CHECK(merged.points[0].x() == doctest::Approx(1.0));
  CHECK(merged.points[0].y() == doctest::Approx(2.0));
  CHECK(merged.normals[0].y() == doctest::Approx(-1.0));
  CHECK(merged.points[1].x() == doctest::Approx(-1.0));

  const auto capped = merge_cloud(merged, cue, {}, {0.05, 3});
  CHECK(capped.size() == 3);
  CHECK(capped.points[0] == merged.points[0]);

  map.scene.set("front_scan", merged);
  map.scene.set("note", std::string("x"));
  const auto clipped = clip(map, {1.0, 2.0, 0.0}, 1.0);
  CHECK(clipped.size() == 1);
  const auto& c = clipped.get<PointCloud2>("front_scan");
  REQUIRE(c.size() == 1);
  CHECK(c.points[0] == merged.points[0]);
  CHECK(clip(map, {1.0, 2.0, 0.0}, 3.0).get<PointCloud2>("front_scan").size() == 2);
}

TEST_CASE("alignment recovers a rigid transform") {
  std::mt19937_64 rng(17);
  const auto root = pipeline::build_preset("lidar-single");
  auto& aligner = preset_aligner(root);
  for (int k = 0; k < 10; ++k) {
    const auto fixed = room_cloud(rng, 400);
    const Pose2 truth(uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3), uniform(rng, -0.2, 0.2));
    const auto moving = geometry::transform_cloud(inverse(truth), fixed);
    const auto r = aligner.align(cues(fixed), cues(moving), Pose2::identity());
    CHECK((r.pose.translation() - truth.translation()).norm() < 1e-3);
    CHECK(std::abs(geometry::wrap_angle(r.pose.theta - truth.theta)) < 1e-3);
    CHECK(r.stats.inlier_ratio() > 0.9);
    CHECK(r.stats.slices.size() == 1);
  }
}

TEST_CASE("degenerate geometry needs a prior") {
  PointCloud2 wall;
  for (int i = 0; i < 200; ++i) wall.push_back({-5.0 + 0.05 * i, 1.0}, {0.0, -1.0});
  const auto single = pipeline::build_preset("lidar-single");
  try {
    preset_aligner(single).align(cues(wall), cues(wall), Pose2::identity());
    FAIL("single wall accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateAlignment);
  }

  const auto odom = pipeline::build_preset("lidar-dual-odom");
  auto moving = cues(wall);
  moving.set(std::string(kOdomCue), Pose2(0.3, 0.0, 0.0));
  const auto r = preset_aligner(odom).align(cues(wall), moving, Pose2(0.3, 0.0, 0.0));
  CHECK(r.stats.has_prior);
  CHECK(r.pose.x == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(std::abs(r.pose.y) < 1e-6);
}

TEST_CASE("tracker splits maps and keeps per-map trajectories") {
  const auto out = sim::simulate(sim::builtin_world("box"), sim::default_robot(false), sim::builtin_path("box"), 3);
  const auto root = pipeline::build_preset("lidar-dual");
  auto& pipe = dynamic_cast<pipeline::Pipeline&>(*root);
  const auto raw = assemble_packets(out.records, pipe.assembly());
  REQUIRE(raw.size() > 100);

  std::size_t finished = 0;
  std::int64_t last_id = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto event = pipe.process(raw[i]);
    CHECK_FALSE(event.degenerate);
    if (event.finished_map) {
      ++finished;
      CHECK(event.finished_map->id == last_id);
      CHECK(event.map_id == last_id + 1);
      CHECK(should_split(event.closing_relative, {1.0, 0.5}));
      REQUIRE_FALSE(event.finished_map->trajectory.empty());
      CHECK(event.finished_map->trajectory.front().pose == Pose2::identity());
      CHECK(event.pose_in_map == Pose2::identity());
      last_id = event.map_id;
    }
  }
  // 100 packets at 1 m/s cover about 10 m, part of it turning
  CHECK(finished >= 7);
  CHECK(finished <= 20);
  const auto& map = pipe.tracker().current_map();
  CHECK(map.scene.find("front_scan") != nullptr);
  CHECK(map.scene.find("rear_scan") != nullptr);
}

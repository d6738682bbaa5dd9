#include <numbers>

#include "mcslam/core/error.hpp"
#include "mcslam/sim/simulator.hpp"

namespace mcslam::sim {

namespace {

constexpr double kPi = std::numbers::pi;

void wall(World& w, double x1, double y1, double x2, double y2) { w.segments.push_back({{x1, y1}, {x2, y2}}); }

void rect(World& w, double x0, double y0, double x1, double y1) {
  wall(w, x0, y0, x1, y0);
  wall(w, x1, y0, x1, y1);
  wall(w, x1, y1, x0, y1);
  wall(w, x0, y1, x0, y0);
}

// Rectangle with quarter-arc corners, counter-clockwise from its start.
void rounded_loop(PathCommand& p, double width, double height, double radius, double speed) {
  const double arc = 0.5 * kPi * radius / speed;
  for (int side = 0; side < 4; ++side) {
    const double straight = (side % 2 == 0 ? width : height) - 2.0 * radius;
    p.steps.push_back({speed, 0.0, straight / speed});
    p.steps.push_back({speed, speed / radius, arc});
  }
}

World box() {
  World w;
  rect(w, -2.5, -1.5, 11.0, 12.0);
  rect(w, 3.0, 4.0, 5.5, 6.5);
  return w;
}

World office() {
  World w;
  rect(w, 0.0, 0.0, 24.0, 14.0);
  rect(w, 4.0, 4.0, 20.0, 10.0);
  for (const double x : {8.0, 12.0, 16.0}) wall(w, x, 4.0, x, 3.6);
  for (const double x : {7.0, 11.0, 15.0}) wall(w, x, 10.0, x, 10.4);
  for (const auto& [x, y] : {std::pair{6.0, 0.3}, {14.0, 0.3}, {9.0, 13.3}, {17.0, 13.3}, {0.3, 6.0}, {23.3, 8.0}}) {
    rect(w, x, y, x + 0.4, y + 0.4);
  }
  return w;
}

World corridor() {
  World w;
  rect(w, 0.0, -1.0, 20.0, 1.0);
  return w;
}

World two_rooms() {
  World w;
  rect(w, 0.0, 0.0, 12.3, 8.0);
  // hallway ceiling with one door per room
  wall(w, 0.0, 1.6, 2.2, 1.6);
  wall(w, 3.2, 1.6, 9.1, 1.6);
  wall(w, 10.1, 1.6, 12.3, 1.6);
  // thick dividing wall
  wall(w, 6.0, 1.6, 6.0, 8.0);
  wall(w, 6.3, 1.6, 6.3, 8.0);
  rect(w, 11.0, 6.8, 11.4, 7.2);
  return w;
}

}  // namespace

std::vector<std::string> builtin_world_names() { return {"box", "office", "corridor", "two_rooms"}; }

World builtin_world(std::string_view name) {
  if (name == "box") return box();
  if (name == "office") return office();
  if (name == "corridor") return corridor();
  if (name == "two_rooms") return two_rooms();
  throw Error(ErrorCode::InvalidArgument, "unknown world '" + std::string(name) + "'");
}

PathCommand builtin_path(std::string_view name) {
  PathCommand p;
  if (name == "box") {
    // 40 m loop
    rounded_loop(p, 12.0 - 0.5 * kPi, 12.0 - 0.5 * kPi, 1.0, 1.0);
  } else if (name == "office") {
    p.start = {3.0, 2.0, 0.0};
    rounded_loop(p, 20.0, 10.0, 1.0, 1.0);
    p.steps.push_back({1.0, 0.0, 6.0});
  } else if (name == "corridor") {
    p.start = {1.5, -0.5, 0.0};
    p.steps = {{1.0, 0.0, 17.0}, {0.5, 1.0, kPi}, {1.0, 0.0, 17.0}};
  } else if (name == "two_rooms") {
    const double circle = 2.0 * kPi * 1.5;
    const double quarter = 0.25 * kPi;
    p.start = {2.7, 4.5, 0.5 * kPi};
    p.steps = {
        {1.0, -1.0 / 1.5, circle},  // room A
        {0.0, 1.0, kPi},            // face the door
        {1.0, 0.0, 3.2},
        {1.0, 2.0, quarter},
        {1.0, 0.0, 5.9},  // hallway
        {1.0, 2.0, quarter},
        {1.0, 0.0, 3.2},
        {1.0, 1.0 / 1.5, circle},  // room B
        {0.0, 1.0, kPi},
        {1.0, 0.0, 3.2},
        {1.0, -2.0, quarter},
        {1.0, 0.0, 5.9},
        {1.0, -2.0, quarter},
        {1.0, 0.0, 3.2},
        {1.0, -1.0 / 1.5, circle},  // room A again
    };
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown world '" + std::string(name) + "'");
  }
  return p;
}

RobotModel default_robot(bool noisy) {
  RobotModel r;
  SensorModel front;
  front.extrinsics = {"front_scan", {0.2, 0.0, 0.0}};
  SensorModel rear;
  rear.extrinsics = {"rear_scan", {-0.2, 0.0, kPi}};
  r.sensors = {front, rear};
  if (!noisy) {
    for (auto& s : r.sensors) s.sigma_range = 0.0;
    r.odom_noise = {0.0, 0.0, 0.0};
  }
  return r;
}

}  // namespace mcslam::sim

#include "mcslam/frontend/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mcslam/core/error.hpp"
#include "mcslam/core/serialization.hpp"

namespace mcslam::frontend {

using core::Json;

namespace {

constexpr std::string_view kOdomTopic = "odom";

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "dataset line " + std::to_string(line) + ": " + what);
}

double number(const Json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_number()) fail(line, std::string("missing number '") + key + "'");
  return j[key].get<double>();
}

std::string_view topic_of(const DatasetRecord& r) {
  if (const auto* scan = std::get_if<LaserScan>(&r)) return scan->topic;
  return kOdomTopic;
}

}  // namespace

double record_time(const DatasetRecord& r) {
  return std::visit([](const auto& m) { return m.timestamp; }, r);
}

std::string format_record(const DatasetRecord& r) {
  Json j = Json::object();
  if (const auto* scan = std::get_if<LaserScan>(&r)) {
    j["type"] = "laser_scan";
    j["topic"] = scan->topic;
    j["t"] = scan->timestamp;
    j["angle_min"] = scan->angle_min;
    j["angle_increment"] = scan->angle_increment;
    j["range_min"] = scan->range_min;
    j["range_max"] = scan->range_max;
    Json ranges = Json::array();
    for (const double v : scan->ranges) {
      if (std::isfinite(v)) {
        ranges.push_back(v);
      } else {
        ranges.push_back(nullptr);
      }
    }
    j["ranges"] = std::move(ranges);
  } else {
    const auto& odom = std::get<OdometryReading>(r);
    j["type"] = "odometry";
    j["t"] = odom.timestamp;
    j["x"] = odom.pose.x;
    j["y"] = odom.pose.y;
    j["theta"] = odom.pose.theta;
  }
  return j.dump();
}

std::string format_dataset(const std::vector<DatasetRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += format_record(r);
    out += '\n';
  }
  return out;
}

std::vector<DatasetRecord> parse_dataset(std::string_view text) {
  std::vector<DatasetRecord> out;
  std::map<std::string, double, std::less<>> last_per_topic;
  double last = -std::numeric_limits<double>::infinity();
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(line_no, e.what());
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) fail(line_no, "missing 'type'");
    const auto type = j["type"].get<std::string>();
    if (type == "laser_scan") {
      LaserScan s;
      if (!j.contains("topic") || !j["topic"].is_string()) fail(line_no, "missing 'topic'");
      s.topic = j["topic"].get<std::string>();
      if (s.topic == kOdomTopic) fail(line_no, "scan topic 'odom' is reserved");
      s.timestamp = number(j, "t", line_no);
      s.angle_min = number(j, "angle_min", line_no);
      s.angle_increment = number(j, "angle_increment", line_no);
      s.range_min = number(j, "range_min", line_no);
      s.range_max = number(j, "range_max", line_no);
      if (!j.contains("ranges") || !j["ranges"].is_array()) fail(line_no, "missing 'ranges'");
      for (const auto& v : j["ranges"]) {
        if (v.is_null()) {
          s.ranges.push_back(std::numeric_limits<double>::infinity());
        } else if (v.is_number()) {
          s.ranges.push_back(v.get<double>());
        } else {
          fail(line_no, "ranges must be numbers or null");
        }
      }
      if (!s.is_valid()) fail(line_no, "scan needs angle_increment > 0 and range_min < range_max");
      out.emplace_back(std::move(s));
    } else if (type == "odometry") {
      OdometryReading o;
      o.timestamp = number(j, "t", line_no);
      o.pose = Pose2(number(j, "x", line_no), number(j, "y", line_no), number(j, "theta", line_no));
      out.emplace_back(o);
    } else {
      fail(line_no, "unknown type '" + type + "'");
    }

    const double t = record_time(out.back());
    if (!std::isfinite(t)) fail(line_no, "non-finite timestamp");
    if (t < last) fail(line_no, "timestamps must be sorted");
    last = t;
    const auto topic = topic_of(out.back());
    auto it = last_per_topic.find(topic);
    if (it != last_per_topic.end() && t <= it->second) fail(line_no, "timestamps must increase within a topic");
    last_per_topic[std::string(topic)] = t;
  }
  return out;
}

Pose2 interpolate_pose(const OdometryReading& a, const OdometryReading& b, double t) {
  const double span = b.timestamp - a.timestamp;
  if (!(span > 0.0)) return a.pose;
  const double alpha = (t - a.timestamp) / span;
  return {a.pose.x + alpha * (b.pose.x - a.pose.x), a.pose.y + alpha * (b.pose.y - a.pose.y),
          a.pose.theta + alpha * geometry::wrap_angle(b.pose.theta - a.pose.theta)};
}

std::vector<RawPacket> assemble_packets(const std::vector<DatasetRecord>& records, const AssemblySettings& settings) {
  std::vector<OdometryReading> odometry;
  std::map<std::string, std::vector<const LaserScan*>> scans;
  for (const auto& r : records) {
    if (const auto* s = std::get_if<LaserScan>(&r)) {
      scans[s->topic].push_back(s);
    } else {
      odometry.push_back(std::get<OdometryReading>(r));
    }
  }
  const auto primary = scans.find(settings.primary_topic);
  if (primary == scans.end()) return {};

  const auto nearest_odometry = [&](double t) -> std::optional<OdometryReading> {
    if (odometry.empty()) return std::nullopt;
    const auto after = std::lower_bound(odometry.begin(), odometry.end(), t,
                                        [](const OdometryReading& o, double v) { return o.timestamp < v; });
    if (after != odometry.end() && after->timestamp == t) return *after;
    if (after != odometry.begin() && after != odometry.end()) {
      return OdometryReading{t, interpolate_pose(*(after - 1), *after, t)};
    }
    const OdometryReading& edge = after == odometry.end() ? odometry.back() : odometry.front();
    if (std::abs(edge.timestamp - t) > settings.sync_window) return std::nullopt;
    return OdometryReading{t, edge.pose};
  };

  std::vector<RawPacket> packets;
  packets.reserve(primary->second.size());
  for (const LaserScan* p : primary->second) {
    RawPacket packet;
    packet.timestamp = p->timestamp;
    packet.scans.push_back(*p);
    for (const auto& [topic, list] : scans) {
      if (topic == settings.primary_topic) continue;
      const auto after = std::lower_bound(list.begin(), list.end(), p->timestamp,
                                          [](const LaserScan* s, double v) { return s->timestamp < v; });
      const LaserScan* best = nullptr;
      if (after != list.begin()) best = *(after - 1);
      if (after != list.end() &&
          (best == nullptr || (*after)->timestamp - p->timestamp < p->timestamp - best->timestamp)) {
        best = *after;
      }
      if (best != nullptr && std::abs(best->timestamp - p->timestamp) <= settings.sync_window) {
        packet.scans.push_back(*best);
      }
    }
    packet.odometry = nearest_odometry(p->timestamp);
    packets.push_back(std::move(packet));
  }
  return packets;
}

}  // namespace mcslam::frontend

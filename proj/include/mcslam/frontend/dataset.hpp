#pragma once

// Dataset files: JSON-lines, one measurement per line, sorted by time.
//   {"type":"laser_scan","topic":..,"t":..,"angle_min":..,"angle_increment":..,
//    "range_min":..,"range_max":..,"ranges":[..]}      null = no return
//   {"type":"odometry","t":..,"x":..,"y":..,"theta":..}

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcslam/frontend/types.hpp"

namespace mcslam::frontend {

using DatasetRecord = std::variant<LaserScan, OdometryReading>;

double record_time(const DatasetRecord& r);

/// One line, no trailing newline. Numbers use shortest round-trip digits.
std::string format_record(const DatasetRecord& r);
std::string format_dataset(const std::vector<DatasetRecord>& records);

/// ParseError (with line number) on malformed lines, invalid scans, or when a
/// stream goes back in time. Timestamps must be non-decreasing overall and
/// strictly increasing within each topic.
std::vector<DatasetRecord> parse_dataset(std::string_view text);

/// Sensor data bundled for one processing step, before pre-processing.
struct RawPacket {
  double timestamp = 0.0;
  std::vector<LaserScan> scans;
  std::optional<OdometryReading> odometry;  // interpolated to `timestamp`
};

struct AssemblySettings {
  std::string primary_topic = "front_scan";
  double sync_window = 0.05;
};

/// One packet per primary-scan timestamp. Other scan topics contribute their
/// nearest scan within the sync window (earlier one on ties). Odometry is
/// interpolated linearly, angle along the shortest arc; outside the odometry
/// time range the nearest reading is used if within the sync window.
std::vector<RawPacket> assemble_packets(const std::vector<DatasetRecord>& records, const AssemblySettings& settings);

Pose2 interpolate_pose(const OdometryReading& a, const OdometryReading& b, double t);

}  // namespace mcslam::frontend

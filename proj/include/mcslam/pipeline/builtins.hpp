#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcslam/config/configurable.hpp"
#include "mcslam/geometry/pose2.hpp"

namespace mcslam::pipeline {

/// Registers every built-in module class.
void register_builtins(config::Registry& registry);
/// A registry holding just the built-ins.
const config::Registry& builtin_registry();

/// Topics and mounting of the default robot.
inline constexpr std::string_view kFrontTopic = "front_scan";
inline constexpr std::string_view kRearTopic = "rear_scan";
inline const geometry::Pose2 kFrontMount{0.2, 0.0, 0.0};
inline const geometry::Pose2 kRearMount{-0.2, 0.0, 3.141592653589793};

std::vector<std::string> preset_names();
/// Configured pipeline for "lidar-single", "lidar-dual" or
/// "lidar-dual-odom". InvalidArgument for other names.
config::ConfigurablePtr build_preset(std::string_view name);
/// write_config(build_preset(name)).
std::string preset_config(std::string_view name);

}  // namespace mcslam::pipeline

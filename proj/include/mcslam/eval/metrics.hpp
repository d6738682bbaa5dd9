#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcslam/geometry/pose2.hpp"

namespace mcslam::eval {

using geometry::Pose2;
using geometry::StampedPose;
using Trajectory = std::vector<StampedPose>;

/// InvalidArgument unless timestamps strictly increase and poses are finite.
void validate(const Trajectory& t);

/// One line per sample: "t x y 0 0 0 sin(theta/2) cos(theta/2)".
std::string format_tum(const Trajectory& t);
/// Blank lines and '#' comments are skipped; the heading is the yaw of the
/// quaternion. ParseError on malformed lines or unsorted timestamps.
Trajectory parse_tum(std::string_view text);

struct PosePair {
  StampedPose gt;
  StampedPose est;
};

/// Each estimate paired with the nearest ground-truth sample in time (the
/// earlier one on ties) when within max_dt. NoPairs when nothing pairs.
std::vector<PosePair> associate(const Trajectory& gt, const Trajectory& est, double max_dt);

/// Rigid T minimizing sum |T * p_est - p_gt|^2. DegenerateAlignment when the
/// estimated positions all coincide.
Pose2 align_trajectories(const std::vector<PosePair>& pairs);

/// RMSE of |T * p_est - p_gt|.
double ate(const std::vector<PosePair>& pairs, const Pose2& alignment = Pose2::identity());

struct RelativeError {
  double translation = 0.0;  // meters
  double rotation = 0.0;     // radians
};

/// RMSE over i of (gt_i^-1 gt_{i+delta})^-1 (est_i^-1 est_{i+delta}).
/// InvalidArgument unless delta >= 1 and there are more than delta pairs.
RelativeError rpe(const std::vector<PosePair>& pairs, std::size_t delta = 1);

/// Sum of distances between consecutive positions.
double path_length(const Trajectory& t);

struct MetricReport {
  double ate_rmse = 0.0;
  double rpe_rmse_trans = 0.0;
  double rpe_rmse_rot = 0.0;
  double frame_rate = 0.0;
  double trajectory_length = 0.0;
  std::size_t pairs = 0;
};

struct EvalOptions {
  std::size_t delta = 1;
  bool align = true;
  double max_dt = 0.02;
};

/// Associates, aligns (unless disabled) and computes both metrics.
/// trajectory_length is measured on the ground truth; frame_rate is left 0.
MetricReport evaluate(const Trajectory& gt, const Trajectory& est, const EvalOptions& options = {});

/// Single-line JSON rendering of a report.
std::string format_report(const MetricReport& report);

}  // namespace mcslam::eval

#pragma once

// Pose graph over local maps.
//
// Graph file (JSON-lines, see core/serialization.hpp):
//   {"class":"PoseGraph","id":0,"fields":{"nodes":N,"edges":M}}
//   per node: its scene PropertyContainer line(s), then
//     {"class":"GraphNode","id":..,"fields":{"node":k,"pose":{"$pose2":..},
//      "origin":{"$pose2":..},"scene":{"$ref":..},"scene_points":n,
//      "trajectory_t":[..],"trajectory":[x0,y0,t0,x1,...]}}
//   per edge:
//     {"class":"GraphEdge","id":..,"fields":{"from":i,"to":j,"kind":"odometry"|"loop",
//      "measurement":{"$pose2":..},"information":[9 values, row-major]}}

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "mcslam/frontend/aligner.hpp"
#include "mcslam/frontend/types.hpp"
#include "mcslam/solver/solver.hpp"

namespace mcslam::graph {

using frontend::LocalMap;
using geometry::Pose2;

enum class EdgeKind { Odometry, Loop };

struct GraphNode {
  std::int64_t id = 0;
  Pose2 pose;  // world frame, current estimate
  LocalMap local_map;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::int64_t from = 0;
  std::int64_t to = 0;
  Pose2 measurement;  // pose of `to` in the frame of `from`
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
  EdgeKind kind = EdgeKind::Odometry;

  friend bool operator==(const GraphEdge& a, const GraphEdge& b) {
    return a.from == b.from && a.to == b.to && a.measurement == b.measurement && a.information == b.information &&
           a.kind == b.kind;
  }
};

struct PoseGraph {
  std::vector<GraphNode> nodes;  // ids strictly increasing
  std::vector<GraphEdge> edges;

  const GraphNode* find(std::int64_t id) const;
  GraphNode* find(std::int64_t id);

  friend bool operator==(const PoseGraph&, const PoseGraph&) = default;
};

/// The first map becomes node 0 at identity with no edge. Later maps are
/// placed at previous_pose * relative and linked by an odometry edge.
void add_local_map(PoseGraph& graph, LocalMap map, const Pose2& relative, const Eigen::Matrix3d& information);

struct LoopResult {
  Pose2 relative;  // measured pose of the query node in the match node frame
  double chi2 = 0.0;
  double inlier_ratio = 0.0;
  double mean_residual = 0.0;
  std::size_t inliers = 0;
  bool accepted = false;
  std::string reason;  // why it was rejected
};

struct LoopCandidate {
  std::int64_t query_id = 0;
  std::int64_t match_id = 0;
  Pose2 initial_guess;  // inverse(pose_match) * pose_query
  std::optional<LoopResult> result;
};

/// Nodes within `radius` of the query position, excluding the query and
/// the `exclude_recent` nodes created right before it, nearest first.
std::vector<LoopCandidate> detect_loops(const PoseGraph& graph, std::int64_t query_id, double radius,
                                        std::size_t exclude_recent);

struct LoopThresholds {
  double min_inlier_ratio = 0.5;
  double max_mean_residual = 0.1;
  double max_correction_translation = 2.0;
  double max_correction_rotation = 1.0;
};

/// Aligns the query scene (moving) against the match scene (fixed) from the
/// candidate's guess and applies the thresholds. Rejection is a normal
/// outcome, including alignment failure.
LoopResult validate_loop(const LoopCandidate& candidate, const PoseGraph& graph, frontend::MultiAligner& aligner,
                         const LoopThresholds& thresholds);

/// Relative-pose factors over all edges with node 0 fixed; poses updated in
/// place.
solver::SolverStats optimize(PoseGraph& graph, const solver::SolverSettings& settings = {});

/// World-frame pose of every trajectory sample: node pose * local pose.
std::vector<geometry::StampedPose> world_trajectory(const PoseGraph& graph);

std::string serialize_graph(const PoseGraph& graph);
/// ParseError for malformed files, DanglingReference for edges naming
/// missing nodes or scenes defined later.
PoseGraph deserialize_graph(std::string_view text);

}  // namespace mcslam::graph

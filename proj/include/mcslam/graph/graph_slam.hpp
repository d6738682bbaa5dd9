#pragma once

#include "mcslam/config/configurable.hpp"
#include "mcslam/frontend/aligner.hpp"
#include "mcslam/graph/pose_graph.hpp"

namespace mcslam::graph {

/// Params: search_radius, exclude_recent, max_candidates.
class LoopDetector : public config::Configurable {
 public:
  void configure() override;
  /// At most max_candidates, nearest first.
  std::vector<LoopCandidate> detect(const PoseGraph& graph, std::int64_t query_id) const;

 private:
  double search_radius_ = 3.0;
  std::size_t exclude_recent_ = 5;
  std::size_t max_candidates_ = 3;
};

/// Params: min_inlier_ratio, max_mean_residual, max_correction_translation,
/// max_correction_rotation. Slot: aligner.
class LoopValidator : public config::Configurable {
 public:
  void configure() override;
  LoopResult validate(const LoopCandidate& candidate, const PoseGraph& graph) const;
  const LoopThresholds& thresholds() const { return thresholds_; }

 private:
  LoopThresholds thresholds_;
  frontend::MultiAligner* aligner_ = nullptr;
};

/// Slot: solver.
class GlobalOptimizer : public config::Configurable {
 public:
  void configure() override;
  solver::SolverStats optimize(PoseGraph& graph) const { return graph::optimize(graph, solver_->settings()); }

 private:
  frontend::IlsSolver* solver_ = nullptr;
};

/// Loop-edge information: odometry information times inlier_count / 100,
/// the factor clamped to [min_scale, max_scale].
Eigen::Matrix3d loop_information(const Eigen::Matrix3d& odometry, std::size_t inliers, double min_scale,
                                 double max_scale);

/// Graph-SLAM back end: adds finished local maps, searches and validates
/// loops, and optimizes after each accepted loop and at finish.
///
/// Params: odometry_information (diagonal, 3 values), loop_scale_min,
/// loop_scale_max. Slots: detector, validator, optimizer.
class GraphSlam : public config::Configurable {
 public:
  void configure() override;
  void reset();

  /// Adds `map` as a new node at previous_pose * relative and processes
  /// loops for it. Returns the number of loop edges added.
  std::size_t add_map(frontend::LocalMap map, const Pose2& relative);
  void finish();

  const PoseGraph& graph() const { return graph_; }
  /// Every validated candidate with its result, in processing order.
  const std::vector<LoopCandidate>& loop_log() const { return loop_log_; }
  /// chi2 before and after each optimize call.
  const std::vector<solver::SolverStats>& optimizations() const { return optimizations_; }

 private:
  void run_optimizer();

  Eigen::Matrix3d odometry_information_ = Eigen::Vector3d(100.0, 100.0, 400.0).asDiagonal();
  double loop_scale_min_ = 0.1;
  double loop_scale_max_ = 10.0;
  LoopDetector* detector_ = nullptr;
  LoopValidator* validator_ = nullptr;
  GlobalOptimizer* optimizer_ = nullptr;

  PoseGraph graph_;
  std::vector<LoopCandidate> loop_log_;
  std::vector<solver::SolverStats> optimizations_;
};

}  // namespace mcslam::graph

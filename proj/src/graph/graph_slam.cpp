#include "mcslam/graph/graph_slam.hpp"

#include <algorithm>

namespace mcslam::graph {

void LoopDetector::configure() {
  search_radius_ = param<double>("search_radius");
  const auto recent = param<std::int64_t>("exclude_recent");
  const auto max = param<std::int64_t>("max_candidates");
  if (!(search_radius_ > 0.0) || recent < 0 || max < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "LoopDetector needs search_radius > 0, exclude_recent >= 0, max_candidates >= 1");
  }
  exclude_recent_ = static_cast<std::size_t>(recent);
  max_candidates_ = static_cast<std::size_t>(max);
}

std::vector<LoopCandidate> LoopDetector::detect(const PoseGraph& graph, std::int64_t query_id) const {
  auto found = detect_loops(graph, query_id, search_radius_, exclude_recent_);
  if (found.size() > max_candidates_) found.resize(max_candidates_);
  return found;
}

void LoopValidator::configure() {
  thresholds_.min_inlier_ratio = param<double>("min_inlier_ratio");
  thresholds_.max_mean_residual = param<double>("max_mean_residual");
  thresholds_.max_correction_translation = param<double>("max_correction_translation");
  thresholds_.max_correction_rotation = param<double>("max_correction_rotation");
  aligner_ = slot_as<frontend::MultiAligner>("aligner");
}

LoopResult LoopValidator::validate(const LoopCandidate& candidate, const PoseGraph& graph) const {
  return validate_loop(candidate, graph, *aligner_, thresholds_);
}

void GlobalOptimizer::configure() { solver_ = slot_as<frontend::IlsSolver>("solver"); }

Eigen::Matrix3d loop_information(const Eigen::Matrix3d& odometry, std::size_t inliers, double min_scale,
                                 double max_scale) {
  const double scale = std::clamp(static_cast<double>(inliers) / 100.0, min_scale, max_scale);
  return scale * odometry;
}

void GraphSlam::configure() {
  const auto& diag = param<std::vector<double>>("odometry_information");
  if (diag.size() != 3 || !(diag[0] > 0 && diag[1] > 0 && diag[2] > 0)) {
    throw Error(ErrorCode::InvalidArgument, "GraphSlam odometry_information needs 3 positive values");
  }
  odometry_information_ = Eigen::Vector3d(diag[0], diag[1], diag[2]).asDiagonal();
  loop_scale_min_ = param<double>("loop_scale_min");
  loop_scale_max_ = param<double>("loop_scale_max");
  if (!(loop_scale_min_ > 0.0) || !(loop_scale_max_ >= loop_scale_min_)) {
    throw Error(ErrorCode::InvalidArgument, "GraphSlam needs 0 < loop_scale_min <= loop_scale_max");
  }
  detector_ = slot_as<LoopDetector>("detector");
  validator_ = slot_as<LoopValidator>("validator");
  optimizer_ = slot_as<GlobalOptimizer>("optimizer");
  reset();
}

void GraphSlam::reset() {
  graph_ = PoseGraph{};
  loop_log_.clear();
  optimizations_.clear();
}

void GraphSlam::run_optimizer() {
  if (graph_.edges.empty()) return;
  optimizations_.push_back(optimizer_->optimize(graph_));
}

std::size_t GraphSlam::add_map(frontend::LocalMap map, const Pose2& relative) {
  add_local_map(graph_, std::move(map), relative, odometry_information_);
  const std::int64_t query = graph_.nodes.back().id;
  std::size_t added = 0;
  for (auto& candidate : detector_->detect(graph_, query)) {
    // the guess follows the latest optimized poses
    candidate.initial_guess = geometry::between(graph_.find(candidate.match_id)->pose, graph_.nodes.back().pose);
    candidate.result = validator_->validate(candidate, graph_);
    if (candidate.result->accepted) {
      const auto info =
          loop_information(odometry_information_, candidate.result->inliers, loop_scale_min_, loop_scale_max_);
      graph_.edges.push_back({candidate.match_id, query, candidate.result->relative, info, EdgeKind::Loop});
      run_optimizer();
      ++added;
    }
    loop_log_.push_back(std::move(candidate));
  }
  return added;
}

void GraphSlam::finish() { run_optimizer(); }

}  // namespace mcslam::graph

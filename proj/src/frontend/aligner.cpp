#include "mcslam/frontend/aligner.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace mcslam::frontend {

using solver::Factor;

void IlsSolver::configure() {
  settings_.max_iterations = static_cast<int>(param<std::int64_t>("max_iterations"));
  settings_.damping = param<double>("damping");
  settings_.chi2_epsilon = param<double>("chi2_epsilon");
  settings_.dense_threshold = static_cast<int>(param<std::int64_t>("dense_threshold"));
  if (settings_.max_iterations < 1 || !(settings_.damping > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "IlsSolver needs max_iterations >= 1 and damping > 0");
  }
}

void CorrespondenceFinder::configure() { normal_angle_ = param<double>("normal_angle"); }

// ---------------------------------------------------------------- stats

std::size_t AlignStats::inliers() const {
  std::size_t n = 0;
  for (const auto& s : slices) n += s.inliers;
  return n;
}

std::size_t AlignStats::moving_points() const {
  std::size_t n = 0;
  for (const auto& s : slices) n += s.moving_points;
  return n;
}

double AlignStats::inlier_ratio() const {
  const auto m = moving_points();
  return m == 0 ? 0.0 : static_cast<double>(inliers()) / static_cast<double>(m);
}

double AlignStats::mean_residual() const {
  double sum = 0.0;
  for (const auto& s : slices) sum += s.residual_sum;
  const auto n = inliers();
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::size_t AlignStats::inliers_of(std::string_view cue) const {
  for (const auto& s : slices) {
    if (s.cue == cue) return s.inliers;
  }
  return 0;
}

// ---------------------------------------------------------------- slices

void Lidar2DAlignerSlice::configure() {
  cue_ = param<std::string>("cue");
  huber_delta_ = param<double>("huber_delta");
  information_ = param<double>("information");
  if (!(information_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "Lidar2DAlignerSlice information must be > 0");
  finder_ = slot_as<CorrespondenceFinder>("finder");
}

bool Lidar2DAlignerSlice::prepare(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
                                  const Pose2& /*guess*/) {
  fixed_ = nullptr;
  moving_ = nullptr;
  search_.reset();
  const auto* f = fixed.find(cue_);
  const auto* m = moving.find(cue_);
  if (f == nullptr || m == nullptr) return false;
  fixed_ = std::get_if<PointCloud2>(f);
  moving_ = std::get_if<PointCloud2>(m);
  if (fixed_ == nullptr || moving_ == nullptr) {
    throw Error(ErrorCode::KindMismatch, "cue '" + cue_ + "' is not a point cloud");
  }
  if (fixed_->empty() || moving_->empty()) return false;
  search_ = std::make_unique<geometry::CorrespondenceFinder>(*fixed_);
  return true;
}

SliceStats Lidar2DAlignerSlice::add_factors(const Pose2& estimate, double gate, std::vector<Factor>& out) {
  SliceStats stats{cue_, 0, moving_->size(), 0.0};
  const auto pairs = search_->find(*moving_, estimate, {gate, finder_->normal_angle()});
  const auto kernel = solver::RobustKernel::huber(huber_delta_);
  const Eigen::Matrix2d info = information_ * Eigen::Matrix2d::Identity();
  for (const auto& c : pairs) {
    const Vector2& p = moving_->points[c.moving_index];
    const Vector2& q = fixed_->points[c.fixed_index];
    if (fixed_->has_normal(c.fixed_index)) {
      const Vector2& n = fixed_->normals[c.fixed_index];
      out.push_back(solver::point_line(0, p, q, n, information_, kernel));
      stats.residual_sum += std::abs(n.dot(geometry::transform_point(estimate, p) - q));
    } else if (!fixed_->has_normals()) {
      out.push_back(solver::point_pair(0, p, q, info, kernel));
      stats.residual_sum += c.distance;
    } else {
      continue;  // flagged during normal estimation
    }
    ++stats.inliers;
  }
  return stats;
}

void OdometryAlignerSlice::configure() {
  cue_ = param<std::string>("cue");
  const auto& diag = param<std::vector<double>>("information");
  if (diag.size() != 3 || !(diag[0] > 0 && diag[1] > 0 && diag[2] > 0)) {
    throw Error(ErrorCode::InvalidArgument, "OdometryAlignerSlice information needs 3 positive values");
  }
  information_ = Eigen::Vector3d(diag[0], diag[1], diag[2]).asDiagonal();
}

bool OdometryAlignerSlice::prepare(const core::PropertyContainer& /*fixed*/, const core::PropertyContainer& moving,
                                   const Pose2& guess) {
  guess_ = guess;
  return moving.contains(cue_);
}

SliceStats OdometryAlignerSlice::add_factors(const Pose2& /*estimate*/, double /*gate*/, std::vector<Factor>& out) {
  out.push_back(solver::pose_prior(0, guess_, information_));
  return {cue_, 0, 0, 0.0};
}

// ---------------------------------------------------------------- MultiAligner

void MultiAligner::configure() {
  outer_iterations_ = static_cast<int>(param<std::int64_t>("outer_iterations"));
  gate_start_ = param<double>("gate_start");
  gate_end_ = param<double>("gate_end");
  const auto min_inliers = param<std::int64_t>("min_inliers");
  max_condition_ = param<double>("max_condition");
  if (outer_iterations_ < 1 || !(gate_start_ > 0.0) || !(gate_end_ > 0.0) || min_inliers < 0) {
    throw Error(ErrorCode::InvalidArgument, "MultiAligner needs outer_iterations >= 1, positive gates, min_inliers >= 0");
  }
  min_inliers_ = static_cast<std::size_t>(min_inliers);
  solver_ = slot_as<IlsSolver>("solver");
  slices_ = slot_list_as<AlignerSlice>("slices");
}

double MultiAligner::gate(int it) const {
  if (outer_iterations_ == 1) return gate_end_;
  const double s = static_cast<double>(it) / static_cast<double>(outer_iterations_ - 1);
  return gate_start_ + (gate_end_ - gate_start_) * s;
}

AlignResult MultiAligner::align(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
                                const Pose2& guess) {
  std::vector<AlignerSlice*> active;
  AlignResult result{guess, {}};
  for (auto* s : slices_) {
    if (s->prepare(fixed, moving, guess)) {
      active.push_back(s);
      result.stats.has_prior = result.stats.has_prior || s->is_prior();
    }
  }
  const bool has_prior = result.stats.has_prior;
  const auto degenerate = [](const std::string& why) { throw Error(ErrorCode::DegenerateAlignment, why); };
  if (active.empty()) degenerate("no slice has data to align");

  std::vector<Factor> factors;
  std::vector<solver::Variable> vars{{0, guess, false}};
  const auto collect = [&](double gate, AlignStats& stats) {
    factors.clear();
    stats.slices.clear();
    for (auto* s : slices_) {
      const bool on = std::find(active.begin(), active.end(), s) != active.end();
      stats.slices.push_back(on ? s->add_factors(vars[0].estimate, gate, factors) : SliceStats{s->cue(), 0, 0, 0.0});
    }
    if (!has_prior && stats.inliers() < min_inliers_) {
      degenerate("only " + std::to_string(stats.inliers()) + " inliers and no prior");
    }
  };

  AlignStats scratch;
  for (int it = 0; it < outer_iterations_; ++it) {
    collect(gate(it), scratch);
    solver::solve(vars, factors, solver_->settings());
  }

  collect(gate_end_, result.stats);
  result.stats.chi2 = solver::total_chi2(vars, factors);
  if (!has_prior) {
    const Eigen::Matrix3d h = solver::system_matrix(vars, factors);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(h, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(2);
    result.stats.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(result.stats.condition <= max_condition_)) {
      degenerate("ill-conditioned alignment, condition number " + std::to_string(result.stats.condition));
    }
  }
  result.pose = vars[0].estimate;
  return result;
}

}  // namespace mcslam::frontend

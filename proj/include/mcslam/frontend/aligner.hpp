#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcslam/config/configurable.hpp"
#include "mcslam/frontend/types.hpp"
#include "mcslam/geometry/correspondence.hpp"
#include "mcslam/solver/solver.hpp"

namespace mcslam::frontend {

/// Solver settings as a module. Params: max_iterations, damping,
/// chi2_epsilon, dense_threshold.
class IlsSolver : public config::Configurable {
 public:
  void configure() override;
  const solver::SolverSettings& settings() const { return settings_; }

 private:
  solver::SolverSettings settings_;
};

/// Data association module. Params: normal_angle (radians). The distance
/// gate comes from the aligner's schedule.
class CorrespondenceFinder : public config::Configurable {
 public:
  void configure() override;
  double normal_angle() const { return normal_angle_; }

 private:
  double normal_angle_ = 0.5;
};

struct SliceStats {
  std::string cue;
  std::size_t inliers = 0;
  std::size_t moving_points = 0;
  double residual_sum = 0.0;  // sum of absolute point residuals over inliers

  friend bool operator==(const SliceStats&, const SliceStats&) = default;
};

struct AlignStats {
  double chi2 = 0.0;
  std::vector<SliceStats> slices;  // one per configured slice, inactive ones report zeros
  bool has_prior = false;
  double condition = 0.0;  // of the point-factor H, 0 when not evaluated

  std::size_t inliers() const;
  std::size_t moving_points() const;
  double inlier_ratio() const;
  double mean_residual() const;
  std::size_t inliers_of(std::string_view cue) const;

  friend bool operator==(const AlignStats&, const AlignStats&) = default;
};

struct AlignResult {
  Pose2 pose;
  AlignStats stats;
};

/// Handles one cue inside the Multi-Aligner.
class AlignerSlice : public config::Configurable {
 public:
  const std::string& cue() const { return cue_; }

  /// Prepares for one alignment. False when this slice has nothing to
  /// contribute (cue missing on either side).
  virtual bool prepare(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
                       const Pose2& guess) = 0;
  /// Appends factors on variable 0 evaluated at `estimate`.
  virtual SliceStats add_factors(const Pose2& estimate, double gate, std::vector<solver::Factor>& out) = 0;
  /// Priors keep the problem well posed without any point factor.
  virtual bool is_prior() const { return false; }

 protected:
  std::string cue_;
};

/// Point-to-line factors on a 2D cloud cue. Point-to-point factors are used
/// when the fixed cloud carries no normals at all; fixed points flagged
/// during normal estimation are skipped. Params: cue, huber_delta,
/// information. Slot: finder.
class Lidar2DAlignerSlice : public AlignerSlice {
 public:
  void configure() override;
  bool prepare(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
               const Pose2& guess) override;
  SliceStats add_factors(const Pose2& estimate, double gate, std::vector<solver::Factor>& out) override;

 private:
  CorrespondenceFinder* finder_ = nullptr;
  double huber_delta_ = 0.1;
  double information_ = 1.0;
  const PointCloud2* fixed_ = nullptr;
  const PointCloud2* moving_ = nullptr;
  std::unique_ptr<geometry::CorrespondenceFinder> search_;
};

/// One pose prior at the guess when the moving side carries the odometry
/// cue. Params: cue, information (diagonal, 3 values).
class OdometryAlignerSlice : public AlignerSlice {
 public:
  void configure() override;
  bool prepare(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
               const Pose2& guess) override;
  SliceStats add_factors(const Pose2& estimate, double gate, std::vector<solver::Factor>& out) override;
  bool is_prior() const override { return true; }

 private:
  Eigen::Matrix3d information_ = Eigen::Matrix3d::Identity();
  Pose2 guess_;
};

/// Registers a moving cue set against a fixed scene with every slice
/// contributing factors to one Pose2 variable.
///
/// Params: outer_iterations, gate_start, gate_end, min_inliers,
/// max_condition. Slots: solver, slices (list).
class MultiAligner : public config::Configurable {
 public:
  void configure() override;

  /// Pose of the moving frame in the fixed frame. DegenerateAlignment when
  /// no prior is active and either the inliers fall below min_inliers or the
  /// point-factor system is ill-conditioned.
  AlignResult align(const core::PropertyContainer& fixed, const core::PropertyContainer& moving,
                    const Pose2& guess);
  AlignResult align(const core::PropertyContainer& fixed, const MeasurementPacket& packet, const Pose2& guess) {
    return align(fixed, packet.cues, guess);
  }

  /// Gate used at outer iteration `it`.
  double gate(int it) const;
  const std::vector<AlignerSlice*>& slices() const { return slices_; }

 private:
  IlsSolver* solver_ = nullptr;
  std::vector<AlignerSlice*> slices_;
  int outer_iterations_ = 10;
  double gate_start_ = 0.5;
  double gate_end_ = 0.1;
  std::size_t min_inliers_ = 10;
  double max_condition_ = 1e8;
};

}  // namespace mcslam::frontend

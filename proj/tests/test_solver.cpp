#include <numbers>

#include "doctest.h"
#include "mcslam/core/error.hpp"
#include "mcslam/solver/solver.hpp"
#include "test_support.hpp"

using namespace mcslam;
using namespace mcslam::solver;
using mcslam::testing::max_relative_error;
using mcslam::testing::numeric_jacobian;
using mcslam::testing::random_factor;
using mcslam::testing::random_pose;
using mcslam::testing::random_spd3;
using mcslam::testing::uniform;

namespace {

std::vector<Variable> ring_ground_truth(int n, double radius) {
  std::vector<Variable> vars;
  for (int i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * i / n;
    vars.push_back({i, Pose2(radius * std::cos(a), radius * std::sin(a), a + std::numbers::pi / 2), i == 0});
  }
  return vars;
}

double normal(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace

TEST_CASE("robust kernel") {
  const auto in = robustify(RobustKernel::huber(1.0), 0.25);
  CHECK(in.chi2 == 0.25);
  CHECK(in.weight == 1.0);
  const auto out = robustify(RobustKernel::huber(1.0), 4.0);
  CHECK(out.chi2 == doctest::Approx(3.0).epsilon(1e-15));  // 2*1*2 - 1
  CHECK(out.weight == doctest::Approx(0.5).epsilon(1e-15));
  const auto off = robustify(RobustKernel{}, 1e6);
  CHECK(off.chi2 == 1e6);
  CHECK(off.weight == 1.0);
}

TEST_CASE("residual examples") {
  const auto pp = point_pair(0, {1, 2}, {1, 2});
  CHECK(residual(pp, Pose2::identity()).norm() == 0.0);
  // log(Z^-1) for Z = (1,0,0) is (-1,0,0)
  const auto rel = relative_pose(0, 1, Pose2(1, 0, 0));
  const auto e = residual(rel, Pose2::identity(), Pose2::identity());
  CHECK(e(0) == -1.0);
  CHECK(e(1) == 0.0);
  CHECK(e(2) == 0.0);
}

TEST_CASE("invalid information is rejected") {
  Eigen::Matrix3d asym = Eigen::Matrix3d::Identity();
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(pose_prior(0, Pose2(), asym), Error);
  CHECK_THROWS_AS(pose_prior(0, Pose2(), -Eigen::Matrix3d::Identity()), Error);
  CHECK_THROWS_AS(point_line(0, {0, 0}, {0, 0}, {1, 0}, 0.0), Error);
}

TEST_CASE("analytic jacobians match central differences") {
  std::mt19937_64 rng(42);
  for (auto kind : {FactorKind::PointPair, FactorKind::PointLine, FactorKind::PosePrior, FactorKind::RelativePose}) {
    for (int i = 0; i < 100; ++i) {
      const Factor f = random_factor(rng, kind);
      const Pose2 a = random_pose(rng), b = random_pose(rng);
      const auto lin = residual_and_jacobian(f, a, b);
      for (int which = 0; which < f.arity(); ++which) {
        const double err = max_relative_error(lin.jacobians[which], numeric_jacobian(f, a, b, which));
        REQUIRE(err < 1e-5);
      }
    }
  }
}

TEST_CASE("zero residuals converge in one iteration with no update") {
  std::vector<Variable> vars{{0, Pose2(1, 2, 0.3), false}};
  const std::vector<Factor> factors{pose_prior(0, Pose2(1, 2, 0.3))};
  const auto stats = solve(vars, factors);
  CHECK(stats.converged);
  CHECK(stats.iterations == 1);
  CHECK(vars[0].estimate == Pose2(1, 2, 0.3));
}

TEST_CASE("single prior converges to its measurement") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const Pose2 z = random_pose(rng);
    std::vector<Variable> vars{{3, random_pose(rng, 1.0), false}};
    const std::vector<Factor> factors{pose_prior(3, z)};
    const auto stats = solve(vars, factors, {.max_iterations = 50});
    CHECK(approx_equal(vars[0].estimate, z, 1e-9, 1e-9));
    CHECK(stats.converged);
  }
}

TEST_CASE("noisy ring with loop closure") {
  std::mt19937_64 rng(123);
  const int n = 20;
  const auto truth = ring_ground_truth(n, 5.0);
  Eigen::Matrix3d info = Eigen::Vector3d(1 / (0.05 * 0.05), 1 / (0.05 * 0.05), 1 / (0.01 * 0.01)).asDiagonal();
  std::vector<Factor> factors;
  std::vector<Variable> vars = truth;
  for (int i = 0; i + 1 < n; ++i) {
    const Pose2 z = between(truth[i].estimate, truth[i + 1].estimate);
    const Pose2 noisy = compose(z, Pose2(0.05 * normal(rng), 0.05 * normal(rng), 0.01 * normal(rng)));
    factors.push_back(relative_pose(i, i + 1, noisy, info));
    vars[i + 1].estimate = compose(vars[i].estimate, noisy);
  }
  factors.push_back(relative_pose(n - 1, 0, between(truth[n - 1].estimate, truth[0].estimate), info));

  const auto max_error = [&](const std::vector<Variable>& v) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, (v[i].estimate.translation() - truth[i].estimate.translation()).norm());
    }
    return worst;
  };
  const double before = total_chi2(vars, factors);
  const double error_before = max_error(vars);
  const auto stats = solve(vars, factors, {.max_iterations = 50});
  CHECK(stats.chi2.back() <= before);
  for (std::size_t i = 1; i < stats.chi2.size(); ++i) CHECK(stats.chi2[i] <= stats.chi2[i - 1]);
  // Measurement noise of this size leaves a bridge-shaped residual drift of
  // roughly 0.2 m at the far side of the ring; the loop must still shrink it.
  CHECK(max_error(vars) < error_before);
  CHECK(max_error(vars) < 0.5);
  CHECK(vars[0].estimate == truth[0].estimate);
}

TEST_CASE("ring with exact factors recovers ground truth from a drifted start") {
  std::mt19937_64 rng(321);
  const int n = 20;
  const auto truth = ring_ground_truth(n, 5.0);
  std::vector<Factor> factors;
  std::vector<Variable> vars = truth;
  for (int i = 0; i + 1 < n; ++i) {
    factors.push_back(relative_pose(i, i + 1, between(truth[i].estimate, truth[i + 1].estimate)));
    vars[i + 1].estimate = compose(vars[i + 1].estimate, Pose2(0.05 * normal(rng), 0.05 * normal(rng), 0.01 * normal(rng)));
  }
  factors.push_back(relative_pose(n - 1, 0, between(truth[n - 1].estimate, truth[0].estimate)));
  const double before = total_chi2(vars, factors);
  const auto stats = solve(vars, factors, {.max_iterations = 50});
  CHECK(stats.chi2.back() <= before);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    worst = std::max(worst, (vars[i].estimate.translation() - truth[i].estimate.translation()).norm());
  }
  CHECK(worst < 0.05);
}

TEST_CASE("gauge: rigidly moving the whole problem moves the solution") {
  std::mt19937_64 rng(77);
  const auto truth = ring_ground_truth(10, 3.0);
  std::vector<Factor> factors;
  std::vector<Variable> vars = truth;
  for (int i = 0; i + 1 < 10; ++i) {
    factors.push_back(relative_pose(i, i + 1, compose(between(truth[i].estimate, truth[i + 1].estimate),
                                                      Pose2(0.1 * normal(rng), 0.1 * normal(rng), 0.02 * normal(rng)))));
  }
  factors.push_back(relative_pose(9, 0, between(truth[9].estimate, truth[0].estimate)));
  for (auto& v : vars) v.estimate = compose(v.estimate, Pose2(0.05 * normal(rng), 0.05 * normal(rng), 0.01));
  vars[0].estimate = truth[0].estimate;

  const Pose2 g(2.0, -1.0, 0.8);
  std::vector<Variable> moved = vars;
  for (auto& v : moved) v.estimate = compose(g, v.estimate);

  solve(vars, factors, {.max_iterations = 50, .chi2_epsilon = 1e-14});
  solve(moved, factors, {.max_iterations = 50, .chi2_epsilon = 1e-14});
  for (std::size_t i = 0; i < vars.size(); ++i) {
    CHECK(approx_equal(moved[i].estimate, compose(g, vars[i].estimate), 1e-6, 1e-6));
  }
}

TEST_CASE("sparse and dense paths agree and solves are deterministic") {
  std::mt19937_64 rng(5);
  const auto truth = ring_ground_truth(30, 4.0);
  std::vector<Factor> factors;
  for (int i = 0; i + 1 < 30; ++i) {
    factors.push_back(relative_pose(i, i + 1, compose(between(truth[i].estimate, truth[i + 1].estimate),
                                                      Pose2(0.1 * normal(rng), 0.1 * normal(rng), 0.02 * normal(rng)))));
  }
  factors.push_back(relative_pose(29, 0, between(truth[29].estimate, truth[0].estimate)));
  auto dense = truth, sparse = truth, again = truth;
  const auto s1 = solve(dense, factors, {.max_iterations = 30});
  const auto s2 = solve(sparse, factors, {.max_iterations = 30, .dense_threshold = 0});
  const auto s3 = solve(again, factors, {.max_iterations = 30});
  CHECK(s1 == s3);
  for (std::size_t i = 0; i < dense.size(); ++i) {
    CHECK(approx_equal(dense[i].estimate, sparse[i].estimate, 1e-8, 1e-8));
    CHECK(dense[i].estimate == again[i].estimate);
  }
}

TEST_CASE("gauge and input errors") {
  std::vector<Variable> vars{{0, Pose2(), false}, {1, Pose2(1, 0, 0), false}};
  const std::vector<Factor> rel{relative_pose(0, 1, Pose2(1, 0, 0))};
  CHECK_THROWS_WITH_AS(solve(vars, rel), doctest::Contains("gauge"), Error);
  try {
    solve(vars, rel);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoFixedGauge);
  }
  const std::vector<Factor> unknown{relative_pose(0, 7, Pose2())};
  vars[0].fixed = true;
  CHECK_THROWS_AS(solve(vars, unknown), Error);
}

TEST_CASE("robust point alignment with an outlier") {
  // 20 exact pairs under a known transform plus one gross outlier
  std::mt19937_64 rng(19);
  const Pose2 truth(0.2, -0.1, 0.05);
  std::vector<Factor> factors;
  for (int i = 0; i < 20; ++i) {
    const Vector2 p(uniform(rng, -3, 3), uniform(rng, -3, 3));
    factors.push_back(point_pair(0, p, transform_point(truth, p), Eigen::Matrix2d::Identity(), RobustKernel::huber(0.1)));
  }
  factors.push_back(point_pair(0, {0, 0}, {5, 5}, Eigen::Matrix2d::Identity(), RobustKernel::huber(0.1)));
  std::vector<Variable> vars{{0, Pose2(), false}};
  const auto stats = solve(vars, factors, {.max_iterations = 100});
  for (std::size_t i = 1; i < stats.chi2.size(); ++i) CHECK(stats.chi2[i] <= stats.chi2[i - 1]);
  CHECK(approx_equal(vars[0].estimate, truth, 0.05, 0.02));
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mcslam/core/error.hpp"
#include "mcslam/eval/metrics.hpp"
#include "test_support.hpp"

using namespace mcslam;
using namespace mcslam::eval;
using mcslam::testing::random_pose;
using mcslam::testing::uniform;
using std::numbers::pi;

namespace {

Trajectory random_walk(std::mt19937_64& rng, std::size_t n) {
  Trajectory t;
  Pose2 p;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({0.1 * static_cast<double>(i), p});
    p = p * Pose2(uniform(rng, 0.0, 0.2), uniform(rng, -0.05, 0.05), uniform(rng, -0.2, 0.2));
  }
  return t;
}

Trajectory moved(const Trajectory& t, const Pose2& by) {
  Trajectory out = t;
  for (auto& s : out) s.pose = by * s.pose;
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("TUM lines round-trip") {
  std::mt19937_64 rng(1);
  const auto t = random_walk(rng, 50);
  const auto text = format_tum(t);
  CHECK(text.substr(0, text.find('\n')) == "0 0 0 0 0 0 0 1");
  const auto back = parse_tum(text);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back[i].timestamp == t[i].timestamp);
    CHECK(back[i].pose.x == t[i].pose.x);
    CHECK(back[i].pose.theta == doctest::Approx(t[i].pose.theta).epsilon(1e-12));
  }
  const auto half_turn = parse_tum("# comment\n\n1.5 1 2 0 0 0 1 0\n");
  REQUIRE(half_turn.size() == 1);
  CHECK(std::abs(half_turn[0].pose.theta) == doctest::Approx(pi));

  CHECK(code_of([] { parse_tum("1 2 3\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_tum("1 0 0 0 0 0 0 x\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_tum("1 0 0 0 0 0 0 1\n1 0 0 0 0 0 0 1\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("association picks the nearest sample and the earlier on ties") {
  const Trajectory gt = {{0.0, {0, 0, 0}}, {1.0, {1, 0, 0}}, {2.0, {2, 0, 0}}};
  const Trajectory est = {{0.4, {}}, {1.5, {}}, {1.6, {}}, {5.0, {}}};
  const auto pairs = associate(gt, est, 0.6);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].gt.timestamp == 0.0);
  CHECK(pairs[1].gt.timestamp == 1.0);
  CHECK(pairs[2].gt.timestamp == 2.0);
  CHECK(code_of([&] { associate(gt, {{9.0, {}}}, 0.1); }) == ErrorCode::NoPairs);
  CHECK(code_of([&] { associate(gt, est, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("identical trajectories score zero") {
  std::mt19937_64 rng(2);
  const auto t = random_walk(rng, 200);
  const auto r = evaluate(t, t);
  CHECK(r.ate_rmse == 0.0);
  CHECK(r.rpe_rmse_trans == 0.0);
  CHECK(r.rpe_rmse_rot == 0.0);
  CHECK(r.pairs == 200);
  CHECK(r.trajectory_length > 0.0);
}

TEST_CASE("ATE is invariant to a rigid transform of the estimate") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const auto gt = random_walk(rng, 100);
    auto est = gt;
    for (auto& s : est) s.pose = s.pose * Pose2(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1), 0.0);
    const double base = evaluate(gt, est).ate_rmse;
    const auto shifted = evaluate(gt, moved(est, random_pose(rng, 50.0)));
    CHECK(std::abs(shifted.ate_rmse - base) < 1e-9);
    CHECK(evaluate(gt, moved(gt, random_pose(rng, 50.0))).ate_rmse < 1e-9);
  }
}

TEST_CASE("hand-computed ATE") {
  const Trajectory gt = {{0, {0, 0, 0}}, {1, {1, 0, 0}}, {2, {2, 0, 0}}, {3, {3, 0, 0}}};
  // constant lateral offset: removed by alignment, seen without it
  const Trajectory lateral = {{0, {0, 1, 0}}, {1, {1, 1, 0}}, {2, {2, 1, 0}}, {3, {3, 1, 0}}};
  CHECK(evaluate(gt, lateral).ate_rmse == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(evaluate(gt, lateral, {1, false, 0.02}).ate_rmse == doctest::Approx(1.0));

  // alternating +-d offsets cannot be aligned away: the RMSE is d
  const double d = 0.3;
  const Trajectory zigzag = {{0, {0, d, 0}}, {1, {1, -d, 0}}, {2, {2, -d, 0}}, {3, {3, d, 0}}};
  CHECK(evaluate(gt, zigzag).ate_rmse == doctest::Approx(d));
  CHECK(evaluate(gt, zigzag, {1, false, 0.02}).ate_rmse == doctest::Approx(d));
}

TEST_CASE("hand-computed RPE") {
  const Trajectory gt = {{0, {0, 0, 0}}, {1, {1, 0, 0}}, {2, {2, 0, 0}}, {3, {3, 0, 0}}};
  // every step 10 % too long
  const Trajectory longer = {{0, {0, 0, 0}}, {1, {1.1, 0, 0}}, {2, {2.2, 0, 0}}, {3, {3.3, 0, 0}}};
  const auto r = evaluate(gt, longer, {1, false, 0.02});
  CHECK(r.rpe_rmse_trans == doctest::Approx(0.1));
  CHECK(r.rpe_rmse_rot == 0.0);
  CHECK(evaluate(gt, longer, {2, false, 0.02}).rpe_rmse_trans == doctest::Approx(0.2));
  CHECK(evaluate(gt, longer, {3, false, 0.02}).rpe_rmse_trans == doctest::Approx(0.3));

  // one extra 0.1 rad turn on the last step
  Trajectory turned = gt;
  turned[3].pose = Pose2(3, 0, 0.1);
  const auto t = rpe(associate(gt, turned, 0.02), 1);
  CHECK(t.translation == doctest::Approx(0.0));
  CHECK(t.rotation == doctest::Approx(std::sqrt(0.01 / 3)));

  // RPE does not depend on where the estimate sits
  std::mt19937_64 rng(4);
  const auto g = random_walk(rng, 60);
  auto e = g;
  for (auto& s : e) s.pose = s.pose * Pose2(uniform(rng, -0.02, 0.02), 0.0, uniform(rng, -0.01, 0.01));
  const auto a = rpe(associate(g, e, 0.02), 1);
  const auto b = rpe(associate(g, moved(e, random_pose(rng)), 0.02), 1);
  CHECK(b.translation == doctest::Approx(a.translation).epsilon(1e-9));
  CHECK(b.rotation == doctest::Approx(a.rotation).epsilon(1e-9));

  CHECK(code_of([&] { rpe(associate(gt, gt, 0.02), 4); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { rpe(associate(gt, gt, 0.02), 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("alignment recovers the transform and rejects a single point") {
  std::mt19937_64 rng(5);
  const auto gt = random_walk(rng, 80);
  const Pose2 by = random_pose(rng, 20.0);
  const Pose2 t = align_trajectories(associate(gt, moved(gt, by), 0.02));
  const Pose2 expect = inverse(by);
  CHECK(t.x == doctest::Approx(expect.x).epsilon(1e-9));
  CHECK(t.y == doctest::Approx(expect.y).epsilon(1e-9));
  CHECK(t.theta == doctest::Approx(expect.theta).epsilon(1e-9));
  CHECK(code_of([] { align_trajectories({{{0, {1, 1, 0}}, {0, {2, 2, 0}}}}); }) == ErrorCode::DegenerateAlignment);
  CHECK(path_length(gt) > 0.0);
}

TEST_CASE("report is one JSON line") {
  MetricReport r;
  r.ate_rmse = 0.5;
  r.pairs = 3;
  const auto text = format_report(r);
  CHECK(text.find('\n') == std::string::npos);
  CHECK(text.find("\"ate_rmse\":0.5") != std::string::npos);
  CHECK(text.find("\"pairs\":3") != std::string::npos);
}

#pragma once

// Random generators and oracles shared by the tests.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mcslam/core/property.hpp"
#include "mcslam/geometry/point_cloud.hpp"
#include "mcslam/geometry/pose2.hpp"
#include "mcslam/solver/factor.hpp"

namespace mcslam::testing {

using geometry::PointCloud2;
using geometry::Pose2;
using geometry::Vector2;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Pose2 random_pose(std::mt19937_64& rng, double trans = 5.0) {
  return {uniform(rng, -trans, trans), uniform(rng, -trans, trans),
          uniform(rng, -std::numbers::pi, std::numbers::pi)};
}

inline PointCloud2 random_cloud(std::mt19937_64& rng, std::size_t n, double extent, bool normals) {
  PointCloud2 c;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2 p(uniform(rng, -extent, extent), uniform(rng, -extent, extent));
    if (normals) {
      const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
      // leave some points without a normal
      const Vector2 n = (i % 7 == 3) ? Vector2::Zero() : Vector2(std::cos(a), std::sin(a));
      c.push_back(p, n);
    } else {
      c.push_back(p);
    }
  }
  return c;
}

/// Random container over every kind, with nesting up to `depth`.
inline core::PropertyContainer random_container(std::mt19937_64& rng, int depth = 2) {
  core::PropertyContainer c;
  const int n = std::uniform_int_distribution<int>(0, 7)(rng);
  for (int i = 0; i < n; ++i) {
    const std::string name = "p" + std::to_string(i);
    switch (std::uniform_int_distribution<int>(0, depth > 0 ? 8 : 7)(rng)) {
      case 0: c.set(name, std::uniform_int_distribution<int>(0, 1)(rng) == 1); break;
      case 1: c.set(name, std::uniform_int_distribution<std::int64_t>(-1'000'000'000'000, 1'000'000'000'000)(rng)); break;
      case 2: c.set(name, uniform(rng, -1e6, 1e6) * std::pow(10.0, uniform(rng, -8, 8))); break;
      case 3: c.set(name, std::string("s\"\\\n\t") + std::to_string(rng() % 1000) + "\xc3\xa9"); break;
      case 4: {
        std::vector<double> v(rng() % 5);
        for (auto& x : v) x = uniform(rng, -10, 10);
        c.set(name, v);
        break;
      }
      case 5: c.set(name, random_pose(rng)); break;
      case 6: c.set(name, random_cloud(rng, rng() % 20, 10.0, rng() % 2 == 0)); break;
      case 7: c.set(name, 1.0 / 3.0 * static_cast<double>(rng() % 100)); break;
      case 8: c.set(name, random_container(rng, depth - 1)); break;
    }
  }
  return c;
}

// ---------------------------------------------------------------- factors

inline Eigen::Matrix3d random_spd3(std::mt19937_64& rng) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = uniform(rng, -1, 1);
  Eigen::Matrix3d m = a * a.transpose() + 0.5 * Eigen::Matrix3d::Identity();
  return 0.5 * (m + m.transpose());
}

inline solver::Factor random_factor(std::mt19937_64& rng, solver::FactorKind kind) {
  switch (kind) {
    case solver::FactorKind::PointPair:
      return solver::point_pair(0, {uniform(rng, -5, 5), uniform(rng, -5, 5)}, {uniform(rng, -5, 5), uniform(rng, -5, 5)});
    case solver::FactorKind::PointLine: {
      const double a = uniform(rng, -3, 3);
      return solver::point_line(0, {uniform(rng, -5, 5), uniform(rng, -5, 5)}, {uniform(rng, -5, 5), uniform(rng, -5, 5)},
                        {std::cos(a), std::sin(a)});
    }
    case solver::FactorKind::PosePrior: return solver::pose_prior(0, random_pose(rng), random_spd3(rng));
    case solver::FactorKind::RelativePose: return solver::relative_pose(0, 1, random_pose(rng, 2.0), random_spd3(rng));
  }
  return {};
}

// Central differences of the residual under the left increment, angle
// components differenced on the circle.
inline solver::JacobianBlock numeric_jacobian(const solver::Factor& f, const Pose2& a, const Pose2& b, int which) {
  constexpr double h = 1e-6;
  const int dim = f.dimension();
  solver::JacobianBlock j(dim, 3);
  for (int k = 0; k < 3; ++k) {
    geometry::Vector3 d = geometry::Vector3::Zero();
    d(k) = h;
    const Pose2 ap = which == 0 ? solver::boxplus(a, d) : a, am = which == 0 ? solver::boxplus(a, -d) : a;
    const Pose2 bp = which == 1 ? solver::boxplus(b, d) : b, bm = which == 1 ? solver::boxplus(b, -d) : b;
    solver::Residual diff = solver::residual(f, ap, bp) - solver::residual(f, am, bm);
    if (dim == 3) diff(2) = geometry::wrap_angle(diff(2));
    j.col(k) = diff / (2 * h);
  }
  return j;
}

inline double max_relative_error(const solver::JacobianBlock& analytic, const solver::JacobianBlock& numeric) {
  double worst = 0.0;
  for (int r = 0; r < analytic.rows(); ++r) {
    for (int c = 0; c < 3; ++c) {
      const double scale = std::max(1.0, std::abs(numeric(r, c)));
      worst = std::max(worst, std::abs(analytic(r, c) - numeric(r, c)) / scale);
    }
  }
  return worst;
}

}  // namespace mcslam::testing

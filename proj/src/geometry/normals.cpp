#include "mcslam/geometry/normals.hpp"

#include <algorithm>
#include <cmath>

#include "mcslam/geometry/kd_tree.hpp"

namespace mcslam::geometry {

namespace {

Vector2 minor_axis(const std::vector<Vector2>& pts, const std::vector<Neighbor>& nbrs) {
  Vector2 mean = Vector2::Zero();
  for (const auto& n : nbrs) mean += pts[n.index];
  mean /= static_cast<double>(nbrs.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& n : nbrs) {
    const Vector2 d = pts[n.index] - mean;
    sxx += d.x() * d.x();
    sxy += d.x() * d.y();
    syy += d.y() * d.y();
  }
  // principal direction of the 2x2 covariance in closed form
  const double phi = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  return {-std::sin(phi), std::cos(phi)};
}

Vector2 oriented(const Vector2& normal, const Vector2& p) {
  return normal.dot(p) > 0.0 ? Vector2(-normal) : normal;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

std::vector<Neighbor> brute_knn(const std::vector<Vector2>& pts, const Vector2& q, std::size_t k) {
  std::vector<Neighbor> all(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) all[i] = {i, squared_distance(q, pts[i])};
  const auto by_distance = [](const Neighbor& a, const Neighbor& b) {
    return a.squared_distance != b.squared_distance ? a.squared_distance < b.squared_distance
                                                    : a.index < b.index;
  };
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), by_distance);
  all.resize(n);
  return all;
}

NormalEstimate all_flagged(const PointCloud2& cloud) {
  NormalEstimate out;
  out.cloud.points = cloud.points;
  out.cloud.normals.assign(cloud.size(), Vector2::Zero());
  for (std::size_t i = 0; i < cloud.size(); ++i) out.flagged.push_back(i);
  return out;
}

template <typename Knn>
NormalEstimate estimate_with(const PointCloud2& cloud, std::size_t k, Knn&& knn, bool parallel) {
  const std::size_t n = cloud.size();
  if (k < 2 || n < k) return all_flagged(cloud);
  const auto& pts = cloud.points;

  std::vector<double> spacing(n);
#pragma omp parallel for schedule(static) if (parallel && n > 512)
  for (std::size_t i = 0; i < n; ++i) spacing[i] = std::sqrt(knn(pts[i], 2)[1].squared_distance);
  const double max_d2 = std::pow(10.0 * median(spacing), 2);

  NormalEstimate out;
  out.cloud.points = pts;
  out.cloud.normals.assign(n, Vector2::Zero());
  std::vector<char> flag(n, 0);
#pragma omp parallel for schedule(static) if (parallel && n > 512)
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = knn(pts[i], k);
    if (nbrs.size() < k || nbrs.back().squared_distance > max_d2) {
      flag[i] = 1;
      continue;
    }
    out.cloud.normals[i] = oriented(minor_axis(pts, nbrs), pts[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (flag[i]) out.flagged.push_back(i);
  }
  return out;
}

}  // namespace

NormalEstimate estimate_normals(const PointCloud2& cloud, std::size_t k) {
  const KdTree tree(cloud.points);
  return estimate_with(
      cloud, k, [&](const Vector2& q, std::size_t kk) { return tree.k_nearest(q, kk); }, true);
}

NormalEstimate estimate_normals_reference(const PointCloud2& cloud, std::size_t k) {
  return estimate_with(
      cloud, k, [&](const Vector2& q, std::size_t kk) { return brute_knn(cloud.points, q, kk); },
      false);
}

}  // namespace mcslam::geometry

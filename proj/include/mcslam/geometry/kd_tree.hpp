#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mcslam/geometry/pose2.hpp"

namespace mcslam::geometry {

/// Squared Euclidean distance. Every search route (tree and brute force)
/// goes through this one function so that ties compare bit-identically.
inline double squared_distance(const Vector2& a, const Vector2& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return dx * dx + dy * dy;
}

struct Neighbor {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

/// Static 2D kd-tree over a borrowed point array. Ties are always broken
/// toward the lower point index, so results match an exhaustive scan.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vector2> points);

  std::size_t size() const { return points_.size(); }

  /// Nearest point with squared distance <= max_squared_distance.
  bool nearest(const Vector2& query, double max_squared_distance, Neighbor& out) const;

  /// The k closest points ordered by (distance, index).
  std::vector<Neighbor> k_nearest(const Vector2& query, std::size_t k) const;

  /// Indices of all points with squared distance <= radius^2, ascending.
  std::vector<std::size_t> radius_search(const Vector2& query, double radius) const;

 private:
  struct Node {
    double split = 0.0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t axis = 0;
  };

  static constexpr std::size_t kLeafSize = 8;

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void nearest_rec(std::int32_t node, const Vector2& q, Neighbor& best, bool& found) const;
  void knn_rec(std::int32_t node, const Vector2& q, std::size_t k, std::vector<Neighbor>& heap) const;
  void radius_rec(std::int32_t node, const Vector2& q, double r2, std::vector<std::size_t>& out) const;

  std::span<const Vector2> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace mcslam::geometry

#include "mcslam/geometry/kd_tree.hpp"

#include <algorithm>
#include <numeric>

namespace mcslam::geometry {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.index < b.index;
}

}  // namespace

KdTree::KdTree(std::span<const Vector2> points) : points_(points) {
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!order_.empty()) {
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(order_.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{0.0, begin, end, -1, -1, 0});
  if (end - begin <= kLeafSize) return id;

  double min_x = points_[order_[begin]].x(), max_x = min_x;
  double min_y = points_[order_[begin]].y(), max_y = min_y;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    const auto& p = points_[order_[i]];
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
  const std::uint8_t axis = (max_x - min_x) >= (max_y - min_y) ? 0 : 1;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });

  nodes_[id].axis = axis;
  nodes_[id].split = points_[order_[mid]][axis];
  const auto left = build(begin, mid);
  const auto right = build(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

bool KdTree::nearest(const Vector2& query, double max_squared_distance, Neighbor& out) const {
  if (nodes_.empty()) return false;
  Neighbor best{0, max_squared_distance};
  bool found = false;
  nearest_rec(0, query, best, found);
  if (found) out = best;
  return found;
}

void KdTree::nearest_rec(std::int32_t node_id, const Vector2& q, Neighbor& best, bool& found) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      const double d2 = squared_distance(q, points_[idx]);
      if (d2 > best.squared_distance) continue;
      if (!found || d2 < best.squared_distance || idx < best.index) {
        best = {idx, d2};
        found = true;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  nearest_rec(near, q, best, found);
  if (diff * diff <= best.squared_distance) nearest_rec(far, q, best, found);
}

std::vector<Neighbor> KdTree::k_nearest(const Vector2& query, std::size_t k) const {
  std::vector<Neighbor> heap;
  if (nodes_.empty() || k == 0) return heap;
  heap.reserve(k + 1);
  knn_rec(0, query, k, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

void KdTree::knn_rec(std::int32_t node_id, const Vector2& q, std::size_t k,
                     std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], squared_distance(q, points_[order_[i]])};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  knn_rec(near, q, k, heap);
  if (heap.size() < k || diff * diff <= heap.front().squared_distance) knn_rec(far, q, k, heap);
}

std::vector<std::size_t> KdTree::radius_search(const Vector2& query, double radius) const {
  std::vector<std::size_t> out;
  if (nodes_.empty()) return out;
  radius_rec(0, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::radius_rec(std::int32_t node_id, const Vector2& q, double r2,
                        std::vector<std::size_t>& out) const {
  const Node& node = nodes_[node_id];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      if (squared_distance(q, points_[order_[i]]) <= r2) out.push_back(order_[i]);
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const auto near = diff < 0.0 ? node.left : node.right;
  const auto far = diff < 0.0 ? node.right : node.left;
  radius_rec(near, q, r2, out);
  if (diff * diff <= r2) radius_rec(far, q, r2, out);
}

}  // namespace mcslam::geometry

#pragma once

#include "graspforge/core.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace graspforge::geometry {

struct NearestPoint {
  int index = -1;
  double distance2 = std::numeric_limits<double>::infinity();
};

/// Static kd-tree over a point set. Nearest-neighbour ties go to the lowest index.
class PointKdTree {
 public:
  PointKdTree() = default;

  explicit PointKdTree(Points3 points) : points_(std::move(points)) {
    if (points_.empty()) return;
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()));
  }

  const Points3& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  NearestPoint nearest(const Vec3& q) const {
    NearestPoint best;
    if (nodes_.empty()) return best;
    std::array<int, 128> stack{};
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
      const Vec3 d = (node.lo - q).cwiseMax(q - node.hi).cwiseMax(0.0);
      if (d.squaredNorm() > best.distance2) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          const int idx = order_[static_cast<std::size_t>(k)];
          const double d2 = (points_[static_cast<std::size_t>(idx)] - q).squaredNorm();
          if (d2 < best.distance2 || (d2 == best.distance2 && idx < best.index)) {
            best.distance2 = d2;
            best.index = idx;
          }
        }
        continue;
      }
      const bool go_left_first = q[node.axis] <= node.split;
      stack[top++] = go_left_first ? node.right : node.left;
      stack[top++] = go_left_first ? node.left : node.right;
    }
    return best;
  }

 private:
  struct Node {
    Vec3 lo, hi;
    int axis = 0;
    double split = 0.0;
    int left = -1, right = -1;
    int first = 0, count = 0;
    EIGEN_MAKE_ALIGNED_OPERATOR_NEW
  };

  int build(int first, int count) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int k = first; k < first + count; ++k) {
      const Vec3& p = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])];
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    nodes_[static_cast<std::size_t>(index)].lo = lo;
    nodes_[static_cast<std::size_t>(index)].hi = hi;
    if (count <= kLeafSize) {
      nodes_[static_cast<std::size_t>(index)].first = first;
      nodes_[static_cast<std::size_t>(index)].count = count;
      return index;
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = first + count / 2;
    auto begin = order_.begin() + first;
    std::nth_element(begin, order_.begin() + mid, begin + count, [&](int a, int b) {
      const double ca = points_[static_cast<std::size_t>(a)][axis];
      const double cb = points_[static_cast<std::size_t>(b)][axis];
      return ca < cb || (ca == cb && a < b);
    });
    const double split = points_[static_cast<std::size_t>(order_[static_cast<std::size_t>(mid)])][axis];
    const int left = build(first, mid - first);
    const int right = build(mid, first + count - mid);
    Node& node = nodes_[static_cast<std::size_t>(index)];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return index;
  }

  static constexpr int kLeafSize = 8;

  Points3 points_;
  std::vector<int> order_;
  std::vector<Node, Eigen::aligned_allocator<Node>> nodes_;
};

}  // namespace graspforge::geometry

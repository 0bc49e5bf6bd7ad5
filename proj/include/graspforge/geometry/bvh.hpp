#pragma once

#include "graspforge/geometry/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace graspforge::geometry {

struct ClosestPoint {
  Vec3 point = Vec3::Zero();
  double distance = std::numeric_limits<double>::infinity();
  int triangle = -1;
};

/// Closest point on triangle (a, b, c) to p, by Voronoi-region classification.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Result of casting one ray for crossing counts.
struct RayCrossings {
  int winding = 0;
  bool ambiguous = false;   // grazing hit near an edge or vertex
  bool on_surface = false;  // origin lies on a triangle
};

/// Bounding-volume hierarchy over triangles; immutable after construction.
class TriangleBvh {
 public:
  TriangleBvh() = default;

  TriangleBvh(Points3 vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    build();
  }

  explicit TriangleBvh(const TriangleMesh& mesh) : TriangleBvh(mesh.vertices, mesh.triangles) {}

  const Points3& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  bool empty() const { return triangles_.empty(); }
  Eigen::AlignedBox3d bounds() const { return nodes_.empty() ? Eigen::AlignedBox3d() : nodes_[0].box; }

  Vec3 corner(std::size_t tri, int k) const { return vertices_[static_cast<std::size_t>(triangles_[tri][k])]; }

  /// Nearest surface point; ties resolved toward the lowest triangle index.
  ClosestPoint closest(const Vec3& q) const {
    ClosestPoint best;
    if (nodes_.empty()) return best;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::array<int, 128> stack{};
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
      if (box_distance2(node.box, q) > best_d2 * (1.0 + 1e-12)) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          const int tri = order_[static_cast<std::size_t>(k)];
          const auto t = static_cast<std::size_t>(tri);
          const Vec3 p = closest_point_on_triangle(q, corner(t, 0), corner(t, 1), corner(t, 2));
          const double d2 = (p - q).squaredNorm();
          if (d2 < best_d2 || (d2 == best_d2 && tri < best.triangle)) {
            best_d2 = d2;
            best.point = p;
            best.triangle = tri;
          }
        }
        continue;
      }
      const Node& l = nodes_[static_cast<std::size_t>(node.left)];
      const Node& r = nodes_[static_cast<std::size_t>(node.right)];
      const double dl = box_distance2(l.box, q);
      const double dr = box_distance2(r.box, q);
      // Push the farther child first so the nearer one is explored next.
      if (dl <= dr) {
        stack[top++] = node.right;
        stack[top++] = node.left;
      } else {
        stack[top++] = node.left;
        stack[top++] = node.right;
      }
    }
    best.distance = std::sqrt(best_d2);
    return best;
  }

  /// Signed count of surface crossings along origin + t * dir, t > 0.
  /// Exits through outward-facing triangles count +1, entries -1.
  RayCrossings cast(const Vec3& origin, const Vec3& dir) const {
    RayCrossings out;
    if (nodes_.empty()) return out;
    const Vec3 inv(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());
    std::array<int, 128> stack{};
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
      if (!ray_hits_box(node.box, origin, inv)) continue;
      if (node.count > 0) {
        for (int k = node.first; k < node.first + node.count; ++k) {
          const auto t = static_cast<std::size_t>(order_[static_cast<std::size_t>(k)]);
          intersect(origin, dir, corner(t, 0), corner(t, 1), corner(t, 2), out);
          if (out.ambiguous || out.on_surface) return out;
        }
        continue;
      }
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
    return out;
  }

  /// Möller-Trumbore crossing test feeding a RayCrossings accumulator.
  static void intersect(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c, RayCrossings& acc) {
    constexpr double kEdge = 1e-10;
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pvec = d.cross(e2);
    const double det = e1.dot(pvec);
    const double scale = e1.norm() * e2.norm();
    const Vec3 tvec = o - a;
    if (std::abs(det) <= 1e-14 * scale) {
      // Ray parallel to the plane; only matters if the origin is in-plane.
      if (std::abs(tvec.dot(e1.cross(e2))) <= 1e-14 * scale * (tvec.norm() + 1e-300)) {
        const Vec3 cp = closest_point_on_triangle(o, a, b, c);
        if ((cp - o).norm() <= 1e-12 * (1.0 + e1.norm())) acc.on_surface = true;
        else acc.ambiguous = true;
      }
      return;
    }
    const double inv_det = 1.0 / det;
    const double u = tvec.dot(pvec) * inv_det;
    if (u < -kEdge || u > 1.0 + kEdge) return;
    const Vec3 qvec = tvec.cross(e1);
    const double v = d.dot(qvec) * inv_det;
    if (v < -kEdge || u + v > 1.0 + kEdge) return;
    const double t = e2.dot(qvec) * inv_det;
    const double len = std::max(e1.norm(), e2.norm());
    if (std::abs(t) <= 1e-12 * len) {
      if (u >= -kEdge && v >= -kEdge && u + v <= 1.0 + kEdge) acc.on_surface = true;
      return;
    }
    if (t < 0.0) return;
    if (u < kEdge || v < kEdge || u + v > 1.0 - kEdge) {
      acc.ambiguous = true;
      return;
    }
    acc.winding += det < 0.0 ? 1 : -1;
  }

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };

  static double box_distance2(const Eigen::AlignedBox3d& box, const Vec3& q) {
    const Vec3 d = (box.min() - q).cwiseMax(q - box.max()).cwiseMax(0.0);
    return d.squaredNorm();
  }

  // Slab test; callers use directions with no zero component.
  static bool ray_hits_box(const Eigen::AlignedBox3d& box, const Vec3& o, const Vec3& inv) {
    double tmin = 0.0;
    double tmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
      double t0 = (box.min()[i] - o[i]) * inv[i];
      double t1 = (box.max()[i] - o[i]) * inv[i];
      if (t0 > t1) std::swap(t0, t1);
      tmin = std::max(tmin, t0);
      tmax = std::min(tmax, t1);
    }
    return tmin <= tmax * (1.0 + 1e-12) + 1e-15;
  }

  void build() {
    nodes_.clear();
    if (triangles_.empty()) return;
    order_.resize(triangles_.size());
    std::iota(order_.begin(), order_.end(), 0);
    centroids_.resize(triangles_.size());
    boxes_.resize(triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      Eigen::AlignedBox3d b;
      for (int k = 0; k < 3; ++k) b.extend(corner(t, k));
      boxes_[t] = b;
      centroids_[t] = b.center();
    }
    nodes_.reserve(2 * triangles_.size());
    build_node(0, static_cast<int>(triangles_.size()));
    centroids_.clear();
    boxes_.clear();
  }

  int build_node(int first, int count) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box;
    Eigen::AlignedBox3d cbox;
    for (int k = first; k < first + count; ++k) {
      const auto t = static_cast<std::size_t>(order_[static_cast<std::size_t>(k)]);
      box.extend(boxes_[t]);
      cbox.extend(centroids_[t]);
    }
    nodes_[static_cast<std::size_t>(index)].box = box;
    if (count <= kLeafSize) {
      nodes_[static_cast<std::size_t>(index)].first = first;
      nodes_[static_cast<std::size_t>(index)].count = count;
      return index;
    }
    int axis = 0;
    cbox.sizes().maxCoeff(&axis);
    const int mid = first + count / 2;
    auto begin = order_.begin() + first;
    std::nth_element(begin, order_.begin() + mid, begin + count, [&](int a, int b) {
      const double ca = centroids_[static_cast<std::size_t>(a)][axis];
      const double cb = centroids_[static_cast<std::size_t>(b)][axis];
      return ca < cb || (ca == cb && a < b);
    });
    const int left = build_node(first, mid - first);
    const int right = build_node(mid, first + count - mid);
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  static constexpr int kLeafSize = 4;

  Points3 vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Node> nodes_;
  std::vector<int> order_;
  Points3 centroids_;
  std::vector<Eigen::AlignedBox3d> boxes_;
};

}  // namespace graspforge::geometry

#pragma once

#include "graspforge/geometry/bvh.hpp"
#include "graspforge/geometry/kdtree.hpp"
#include "graspforge/geometry/mesh.hpp"
#include "graspforge/geometry/sampling.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace graspforge::geometry {

/// Generalized winding number of `p` with respect to a triangle soup.
inline double winding_number(const Points3& vertices, const std::vector<Triangle>& triangles, const Vec3& p) {
  double total = 0.0;
  for (const auto& t : triangles) {
    const Vec3 a = vertices[static_cast<std::size_t>(t[0])] - p;
    const Vec3 b = vertices[static_cast<std::size_t>(t[1])] - p;
    const Vec3 c = vertices[static_cast<std::size_t>(t[2])] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

namespace detail {

// Fixed probe directions with no zero component.
inline const std::array<Vec3, 8>& probe_directions() {
  static const std::array<Vec3, 8> dirs = [] {
    std::array<Vec3, 8> d = {Vec3(0.5773502691896258, 0.5773502691896258, 0.5773502691896258),
                             Vec3(0.2672612419124244, -0.5345224838248488, 0.8017837257372732),
                             Vec3(-0.7071067811865475, 0.3128, 0.6349),
                             Vec3(0.1234, 0.9876, -0.0961),
                             Vec3(-0.3333, -0.6667, -0.6667),
                             Vec3(0.8, -0.1, 0.5916),
                             Vec3(-0.05, 0.07, -0.9963),
                             Vec3(0.6, 0.64, -0.48)};
    for (auto& v : d) v.normalize();
    return d;
  }();
  return dirs;
}

}  // namespace detail

/// Inside test against a closed triangle set (`watertight`) or an open one.
///
/// Closed sets use signed ray crossings, which coincide with ray parity for
/// a single closed surface and give the union for overlapping closed
/// components. Open sets use the generalized winding number at 0.5. Points on
/// the surface count as outside.
inline bool point_inside(const TriangleBvh& bvh, bool watertight, const Vec3& p) {
  if (bvh.empty() || !bvh.bounds().contains(p)) return false;
  if (watertight) {
    for (const auto& dir : detail::probe_directions()) {
      const RayCrossings c = bvh.cast(p, dir);
      if (c.on_surface) return false;
      if (!c.ambiguous) return c.winding != 0;
    }
  }
  return winding_number(bvh.vertices(), bvh.triangles(), p) > 0.5;
}

struct InsideMask {
  std::vector<std::uint8_t> inside;
  bool approximate = false;  // winding-number path on a non-watertight mesh

  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : inside) n += v;
    return n;
  }
};

/// Triangle BVH plus an optional kd-tree over surface samples.
class ProximityIndex {
 public:
  ProximityIndex() = default;

  explicit ProximityIndex(TriangleMesh mesh) : mesh_(std::move(mesh)), bvh_(mesh_) {}

  ProximityIndex(TriangleMesh mesh, const SurfaceSamples& samples)
      : mesh_(std::move(mesh)), bvh_(mesh_), samples_(samples.points) {}

  const TriangleMesh& mesh() const { return mesh_; }
  const TriangleBvh& bvh() const { return bvh_; }
  const PointKdTree& sample_tree() const { return samples_; }

  ClosestPoint closest(const Vec3& q) const { return bvh_.closest(q); }
  NearestPoint nearest_sample(const Vec3& q) const { return samples_.nearest(q); }
  bool inside(const Vec3& q) const { return point_inside(bvh_, mesh_.watertight, q); }

 private:
  TriangleMesh mesh_;
  TriangleBvh bvh_;
  PointKdTree samples_;
};

inline ClosestPoint closest_surface_point(const Vec3& query, const ProximityIndex& index) {
  return index.closest(query);
}

inline InsideMask classify_inside(const Points3& points, const ProximityIndex& index) {
  InsideMask out;
  out.approximate = !index.mesh().watertight;
  out.inside.reserve(points.size());
  for (const auto& p : points) out.inside.push_back(index.inside(p) ? 1 : 0);
  return out;
}

inline InsideMask classify_inside(const Points3& points, const TriangleMesh& mesh) {
  return classify_inside(points, ProximityIndex(mesh));
}

/// Unsigned closest-surface distance, negated inside the mesh.
inline double signed_distance(const Vec3& query, const ProximityIndex& index) {
  const double d = index.closest(query).distance;
  return index.inside(query) ? -d : d;
}

struct FurthestPoint {
  Vec3 point = Vec3::Zero();
  double projected_distance = 0.0;
  std::size_t index = 0;
};

inline void require_unit(const Vec3& dir, const char* what) {
  if (!dir.allFinite() || std::abs(dir.norm() - 1.0) >= 1e-9)
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a unit vector");
}

/// Sample maximizing dot(p - center, dir); ties go to the lowest index.
inline FurthestPoint furthest_point_along(const Points3& samples, const Vec3& center, const Vec3& dir) {
  require_unit(dir, "direction");
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "furthest point of empty sample set");
  FurthestPoint best;
  best.projected_distance = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = (samples[i] - center).dot(dir);
    if (d > best.projected_distance) {
      best = {samples[i], d, i};
    }
  }
  return best;
}

inline FurthestPoint furthest_point_along(const SurfaceSamples& samples, const Vec3& center, const Vec3& dir) {
  return furthest_point_along(samples.points, center, dir);
}

struct PlaneProjection {
  Points2 points;
  Vec3 origin = Vec3::Zero();  // centroid of the input points
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();

  Vec3 lift(const Vec2& p) const { return origin + p.x() * e1 + p.y() * e2; }
  Vec3 to_world_direction(const Vec2& d) const { return d.x() * e1 + d.y() * e2; }
};

/// Right-handed in-plane basis (e1, e2, normal), deterministic in `normal`.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
  int pick = 0;
  normal.cwiseAbs().minCoeff(&pick);
  const Vec3 e1 = Vec3::Unit(pick).cross(normal).normalized();
  const Vec3 e2 = normal.cross(e1);
  return {e1, e2};
}

inline PlaneProjection project_to_plane(const Points3& points, const Vec3& normal) {
  require_unit(normal, "plane normal");
  PlaneProjection out;
  out.normal = normal;
  std::tie(out.e1, out.e2) = plane_basis(normal);
  if (points.empty()) return out;
  Vec3 c = Vec3::Zero();
  for (const auto& p : points) c += p;
  out.origin = c / static_cast<double>(points.size());
  out.points.reserve(points.size());
  for (const auto& p : points) {
    const Vec3 d = p - out.origin;
    out.points.emplace_back(d.dot(out.e1), d.dot(out.e2));
  }
  return out;
}

struct PrincipalAxes2D {
  Vec2 major = Vec2::UnitX();
  Vec2 minor = Vec2::UnitY();
  double major_variance = 0.0;
  double minor_variance = 0.0;
  bool degenerate = false;  // near-isotropic: minor / major > 0.98
};

inline constexpr double kIsotropyRatio = 0.98;

namespace detail {

inline Vec2 canonical_sign(Vec2 v) {
  if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
  return v;
}

}  // namespace detail

/// Principal axes of a planar point set from its 2x2 population covariance.
inline PrincipalAxes2D principal_axes_2d(const Points2& points) {
  if (points.size() < 3) throw Error(ErrorCode::DegenerateSet, "need at least 3 points for principal axes");
  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const Vec2 d = p - mean;
    sxx += d.x() * d.x();
    sxy += d.x() * d.y();
    syy += d.y() * d.y();
  }
  const double n = static_cast<double>(points.size());
  sxx /= n;
  sxy /= n;
  syy /= n;

  const double half_trace = 0.5 * (sxx + syy);
  const double radius = std::hypot(0.5 * (sxx - syy), sxy);
  PrincipalAxes2D out;
  out.major_variance = half_trace + radius;
  out.minor_variance = std::max(0.0, half_trace - radius);
  if (!(out.major_variance > 0.0) || out.minor_variance <= 1e-12 * out.major_variance)
    throw Error(ErrorCode::DegenerateSet, "planar point set is collinear or coincident");

  const double angle = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  out.major = detail::canonical_sign(Vec2(std::cos(angle), std::sin(angle)));
  out.minor = detail::canonical_sign(Vec2(-std::sin(angle), std::cos(angle)));
  out.degenerate = out.minor_variance / out.major_variance > kIsotropyRatio;
  return out;
}

}  // namespace graspforge::geometry

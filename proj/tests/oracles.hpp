#pragma once

#include "graspforge/geometry.hpp"
#include "test_support.hpp"

#include <limits>
#include <random>

// Brute-force references shared by the unit suites and the acceptance checks.

namespace graspforge::testing {

using geometry::ClosestPoint;
using geometry::TriangleMesh;
using geometry::Triangle;

inline ClosestPoint brute_force_closest(const TriangleMesh& mesh, const Vec3& q) {
  ClosestPoint best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 p = geometry::closest_point_on_triangle(q, mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
    const double d2 = (p - q).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best.point = p;
      best.triangle = static_cast<int>(t);
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

// Ray parity along +x with plane intersection and same-side tests.
inline bool ray_parity_inside(const TriangleMesh& mesh, const Vec3& p) {
  const Vec3 dir = Vec3(1.0, 0.0123, 0.00457).normalized();
  int hits = 0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
    const Vec3 n = (b - a).cross(c - a);
    const double denom = n.dot(dir);
    if (denom == 0.0) continue;
    const double s = n.dot(a - p) / denom;
    if (s <= 0.0) continue;
    const Vec3 x = p + s * dir;
    const bool in = n.dot((b - a).cross(x - a)) >= 0 && n.dot((c - b).cross(x - b)) >= 0 &&
                    n.dot((a - c).cross(x - c)) >= 0;
    hits += in ? 1 : 0;
  }
  return hits % 2 == 1;
}

inline TriangleMesh random_soup(std::mt19937_64& gen, int n) {
  Points3 v;
  std::vector<Triangle> f;
  for (int i = 0; i < n; ++i) {
    const Vec3 base = random_point(gen, -1.0, 1.0);
    for (int k = 0; k < 3; ++k) v.push_back(base + random_point(gen, -0.2, 0.2));
    f.push_back({3 * i, 3 * i + 1, 3 * i + 2});
  }
  return geometry::clean_mesh(v, f, 1.0);
}

inline TriangleMesh bumpy_sphere(std::mt19937_64& gen) {
  TriangleMesh m = geometry::make_icosphere(0.5, 2);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  for (auto& p : m.vertices) p *= u(gen);
  return m;
}

}  // namespace graspforge::testing

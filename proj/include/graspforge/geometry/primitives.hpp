#pragma once

#include "graspforge/geometry/mesh.hpp"

#include <cmath>
#include <map>
#include <numbers>

// Closed, outward-oriented primitive meshes centered at the origin.

namespace graspforge::geometry {

inline TriangleMesh make_icosphere(double radius, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Points3 v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
               {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoints;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      v.push_back((v[static_cast<std::size_t>(a)] + v[static_cast<std::size_t>(b)]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]);
      const int b = midpoint(t[1], t[2]);
      const int c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return clean_mesh(std::move(v), f, 1.0);
}

/// Axis-aligned box with the given full extents, each face split into two triangles.
inline TriangleMesh make_box(const Vec3& extents) {
  const Vec3 h = extents / 2.0;
  Points3 v;
  for (int i = 0; i < 8; ++i)
    v.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(), (i & 4) ? h.z() : -h.z());
  const std::vector<Triangle> f = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
  return clean_mesh(std::move(v), f, 1.0);
}

/// Capped cylinder along z.
inline TriangleMesh make_cylinder(double radius, double length, int segments = 48) {
  Points3 v;
  std::vector<Triangle> f;
  const double hz = length / 2.0;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
    v.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const int bottom = static_cast<int>(v.size());
  v.emplace_back(0.0, 0.0, -hz);
  const int top = bottom + 1;
  v.emplace_back(0.0, 0.0, hz);
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    f.push_back({b0, b1, t1});
    f.push_back({b0, t1, t0});
    f.push_back({bottom, b1, b0});
    f.push_back({top, t0, t1});
  }
  return clean_mesh(std::move(v), f, 1.0);
}

}  // namespace graspforge::geometry

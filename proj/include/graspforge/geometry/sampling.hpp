#pragma once

#include "graspforge/geometry/mesh.hpp"

#include <algorithm>
#include <cstdint>

namespace graspforge::geometry {

struct SurfaceSamples {
  Points3 points;
  std::vector<int> source_triangle;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  Vec3 centroid() const {
    if (points.empty()) throw Error(ErrorCode::EmptySamples, "centroid of empty sample set");
    Vec3 c = Vec3::Zero();
    for (const auto& p : points) c += p;
    return c / static_cast<double>(points.size());
  }
};

/// Area-weighted surface sampling.
///
/// Point i draws its triangle from the stratum [i/n, (i+1)/n) of the
/// cumulative area distribution and its barycentric coordinates uniformly;
/// every random number is keyed by (seed, i), so the result does not depend on
/// evaluation order.
inline SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.triangles.empty()) throw Error(ErrorCode::EmptyMesh, "cannot sample an empty mesh");
  SurfaceSamples out;
  out.seed = seed;
  if (n == 0) return out;

  std::vector<double> cdf(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    total += mesh.triangle_area(t);
    cdf[t] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::EmptyMesh, "mesh has zero surface area");

  out.points.reserve(n);
  out.source_triangle.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(i) + rng::uniform(seed, i, 0)) / static_cast<double>(n) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const auto tri = static_cast<std::size_t>(it - cdf.begin());
    const double r1 = std::sqrt(rng::uniform(seed, i, 1));
    const double r2 = rng::uniform(seed, i, 2);
    const double a = 1.0 - r1;
    const double b = r1 * (1.0 - r2);
    const double c = r1 * r2;
    out.points.push_back(a * mesh.corner(tri, 0) + b * mesh.corner(tri, 1) + c * mesh.corner(tri, 2));
    out.source_triangle.push_back(static_cast<int>(tri));
  }
  return out;
}

}  // namespace graspforge::geometry

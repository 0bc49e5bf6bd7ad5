#pragma once

#include "graspforge/dataset/manifest.hpp"
#include "graspforge/geometry/queries.hpp"

#include <numbers>

namespace graspforge::dataset {

struct WidthResult {
  double width = 0.0;        // m, across the narrowest in-plane direction
  bool used_fallback = false;  // principal axes undefined: bounding-box extent instead
};

/// Extent of the samples projected onto the plane orthogonal to `direction`,
/// measured along the minor principal axis of that projection.
inline WidthResult object_width(const Points3& samples, const Vec3& direction) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "width of an empty sample set");
  const auto proj = geometry::project_to_plane(samples, direction.normalized());
  WidthResult out;
  try {
    const auto axes = geometry::principal_axes_2d(proj.points);
    if (axes.degenerate) throw Error(ErrorCode::DegenerateSet, "isotropic cross-section");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : proj.points) {
      const double s = p.dot(axes.minor);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    out.width = hi - lo;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSet) throw;
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (const auto& p : proj.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    out.width = (hi - lo).minCoeff();
    out.used_fallback = true;
  }
  return out;
}

struct FilterResult {
  std::vector<WidthResult> widths;
  std::vector<bool> passes;  // width <= max_width, per direction
  bool keep = false;         // at least one direction passes
};

inline FilterResult filter_object(const Points3& samples, const std::vector<Vec3>& directions, double max_width = 0.15) {
  if (samples.empty()) throw Error(ErrorCode::EmptySamples, "cannot filter an object without samples");
  FilterResult out;
  for (const auto& d : directions) {
    out.widths.push_back(object_width(samples, d));
    out.passes.push_back(out.widths.back().width <= max_width);
    out.keep = out.keep || out.passes.back();
  }
  return out;
}

/// Uniform on the spherical cap of half-angle `half_angle_deg` around `bearing`;
/// direction i depends only on (seed, i).
inline std::vector<Vec3> sample_grasp_directions(const Vec3& bearing, int n, double half_angle_deg, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "direction count must be >= 0");
  if (!(half_angle_deg > 0.0 && half_angle_deg <= 90.0)) throw Error(ErrorCode::InvalidArgument, "cone half-angle must lie in (0, 90]");
  const Vec3 b = bearing.normalized();
  const auto [e1, e2] = geometry::plane_basis(b);
  const double cos_max = std::cos(half_angle_deg * std::numbers::pi / 180.0);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::uint64_t>(i);
    const double c = 1.0 - rng::uniform(seed, k, 0) * (1.0 - cos_max);
    const double phi = 2.0 * std::numbers::pi * rng::uniform(seed, k, 1);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    out.push_back((c * b + s * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized());
  }
  return out;
}

/// Position offset uniform in the workspace ranges; orientation kept unless a yaw range is given.
inline Rigid sample_target_pose(const Rigid& initial, const WorkspaceRanges& ranges, std::uint64_t seed, double yaw_deg = 0.0) {
  auto draw = [&](const Interval& r, std::uint64_t axis) { return r.min + (r.max - r.min) * rng::uniform(seed, axis, 2); };
  Rigid out = initial;
  out.t += Vec3(draw(ranges.x, 0), draw(ranges.y, 1), draw(ranges.z, 2));
  if (yaw_deg > 0.0) {
    const double yaw = (2.0 * rng::uniform(seed, 3, 2) - 1.0) * yaw_deg * std::numbers::pi / 180.0;
    out.R = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix() * initial.R;
  }
  return out;
}

}  // namespace graspforge::dataset

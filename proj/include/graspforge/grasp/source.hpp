#pragma once

#include "graspforge/geometry/primitives.hpp"
#include "graspforge/grasp/optimize.hpp"
#include "graspforge/hand/io.hpp"
#include "graspforge/hand/mirror.hpp"
#include "graspforge/hand/test_asset.hpp"

#include <sstream>

// Object sources are mesh paths (.obj/.off) or built-in primitives:
//   icosphere:RADIUS[,SUBDIVISIONS]   box:X,Y,Z   cylinder:RADIUS,LENGTH[,SEGMENTS]

namespace graspforge::grasp {

namespace detail {

inline std::vector<double> parse_numbers(const std::string& text, const std::string& source) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(value) || !(value > 0.0))
      throw Error(ErrorCode::ParseError, "object source '" + source + "': expected positive numbers");
    out.push_back(value);
  }
  return out;
}

}  // namespace detail

inline bool is_primitive_source(const std::string& source) {
  for (const char* p : {"icosphere:", "box:", "cylinder:"})
    if (source.rfind(p, 0) == 0) return true;
  return false;
}

/// Mesh for a source string, uniformly scaled.
inline geometry::TriangleMesh load_object_mesh(const std::string& source, double scale = 1.0) {
  if (!is_primitive_source(source)) return geometry::load_mesh(source, scale);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidArgument, "mesh scale must be positive");
  const auto colon = source.find(':');
  const std::string kind = source.substr(0, colon);
  const auto args = detail::parse_numbers(source.substr(colon + 1), source);
  auto count = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw Error(ErrorCode::ParseError, "object source '" + source + "': wrong number of parameters");
  };
  if (kind == "icosphere") {
    count(1, 2);
    return geometry::make_icosphere(scale * args[0], args.size() > 1 ? static_cast<int>(args[1]) : 3);
  }
  if (kind == "box") {
    count(3, 3);
    return geometry::make_box(scale * Vec3(args[0], args[1], args[2]));
  }
  count(2, 3);
  return geometry::make_cylinder(scale * args[0], scale * args[1], args.size() > 2 ? static_cast<int>(args[2]) : 48);
}

inline GraspObject load_object(const std::string& source, double scale, std::size_t samples, std::uint64_t seed) {
  return GraspObject::build(load_object_mesh(source, scale), samples, seed);
}

/// Rebuilds the object a set of keyframes was optimized against.
inline GraspObject load_object(const GraspProvenance& p) {
  if (p.mesh.empty()) throw Error(ErrorCode::InvalidArgument, "keyframes carry no object source");
  return load_object(p.mesh, p.scale, p.sample_count, p.seed);
}

/// Reflected object whose samples are the reflected samples, so the left-hand
/// counterpart of a grasp sees exactly the mirrored geometry.
inline GraspObject mirror_object(const GraspObject& o) {
  GraspObject m;
  m.samples = o.samples;
  for (auto& p : m.samples.points) p = hand::mirror_point(p);
  m.center = hand::mirror_point(o.center);
  m.index = geometry::ProximityIndex(geometry::mirror_mesh(o.mesh()), m.samples);
  return m;
}

/// "test" selects the procedural asset; anything else is a hand asset JSON path.
inline hand::HandAsset load_hand(const std::string& spec) {
  if (spec == "test") return hand::build_test_asset();
  return hand::load_hand_asset(spec);
}

}  // namespace graspforge::grasp

#pragma once

#include "graspforge/geometry.hpp"
#include "graspforge/grasp/config.hpp"
#include "graspforge/hand/kinematics.hpp"

#include <memory>

namespace graspforge::grasp {

/// Object geometry prepared for grasping: mesh index, surface samples and centre.
struct GraspObject {
  geometry::SurfaceSamples samples;
  geometry::ProximityIndex index;
  Vec3 center = Vec3::Zero();  // centroid of the surface samples

  const geometry::TriangleMesh& mesh() const { return index.mesh(); }

  static GraspObject build(geometry::TriangleMesh mesh, std::size_t samples, std::uint64_t seed) {
    GraspObject o;
    o.samples = geometry::sample_surface(mesh, samples, seed);
    o.center = o.samples.centroid();
    o.index = geometry::ProximityIndex(std::move(mesh), o.samples);
    return o;
  }
};

struct GraspRequest {
  std::shared_ptr<const hand::HandAsset> asset;
  std::shared_ptr<const GraspObject> object;
  Vec3 direction = Vec3::UnitZ();  // v_grasp: wrist -> object centre, unit length
  OptimizerConfig config;
  bool hand_closed = true;  // hand faces form closed surfaces (exact inside test)
};

inline GraspRequest make_request(std::shared_ptr<const hand::HandAsset> asset, std::shared_ptr<const GraspObject> object,
                                 const Vec3& direction, const OptimizerConfig& config = {}) {
  if (!asset || !object) throw Error(ErrorCode::InvalidArgument, "grasp request needs a hand and an object");
  if (object->samples.empty()) throw Error(ErrorCode::EmptySamples, "object has no surface samples");
  if (!direction.allFinite() || direction.norm() < 1e-12) throw Error(ErrorCode::InvalidArgument, "zero grasp direction");
  config.validate();
  GraspRequest r;
  r.hand_closed = geometry::compute_watertight(asset->faces);
  r.asset = std::move(asset);
  r.object = std::move(object);
  r.direction = direction.normalized();
  r.config = config;
  return r;
}

}  // namespace graspforge::grasp

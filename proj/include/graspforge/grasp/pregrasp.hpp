#pragma once

#include "graspforge/grasp/adam.hpp"
#include "graspforge/grasp/request.hpp"

#include <cmath>

namespace graspforge::grasp {

/// Gripper-like finger pose: starting flat with zero global transform, push the
/// thumb tip as far as possible to the palmar side (-y).
inline hand::Coefficients optimize_finger_pregrasp(const hand::HandAsset& asset, const OptimizerConfig& config) {
  hand::HandPose pose = hand::flat_pose(asset);
  const auto tip = static_cast<std::size_t>(asset.fingertips[hand::Thumb]);
  AdamState adam;
  const AdamParams hp{config.adam_beta1, config.adam_beta2, config.adam_epsilon};
  for (int it = 0; it < config.pregrasp_iterations; ++it) {
    const auto fk = hand::forward_kinematics(asset, pose, true);
    const Eigen::VectorXd grad = hand::vertex_jacobian(asset, fk, tip).row(1).tail<hand::kPcaComponents>().transpose();
    adam_step(pose.coefficients, grad, config.pregrasp_learning_rate, adam, hp);
  }
  return pose.coefficients;
}

struct GlobalPregrasp {
  Vec3 translation = Vec3::Zero();
  Vec3 orientation = Vec3::Zero();
  Vec3 center = Vec3::Zero();
  double furthest_distance = 0.0;  // projected distance of the furthest sample toward the wrist
  double clearance = 0.0;          // clearance actually used
  int clearance_escalations = 0;
  bool axis_undefined = false;     // PCA degenerate: grasp-axis rotation skipped
  bool axis_flipped = false;       // aligned with -minor instead of +minor
  double axis_rotation = 0.0;      // roll about v_grasp applied for the grasp axis (rad)
  Vec3 minor_axis = Vec3::Zero();  // world-space minor principal direction (zero if undefined)
};

namespace detail {

// Signed angle about `axis` taking `from` to `to`, both orthogonal to `axis`.
inline double signed_angle(const Vec3& from, const Vec3& to, const Vec3& axis) {
  return std::atan2(axis.dot(from.cross(to)), from.dot(to));
}

inline std::size_t hand_vertices_inside(const hand::HandAsset& asset, const hand::HandPose& pose, const GraspObject& object) {
  const auto state = hand::skin_vertices(asset, pose);
  return geometry::classify_inside(state.vertices, object.index).count();
}

}  // namespace detail

/// Wrist translation and orientation for the pre-grasp: heading along
/// v_grasp, grasp axis across the narrowest in-plane extent of the object,
/// wrist backed off past the furthest sample by a clearance that doubles on collision.
inline GlobalPregrasp compute_global_pregrasp(const GraspRequest& request, const hand::Coefficients& theta_pre) {
  const auto& asset = *request.asset;
  const auto& object = *request.object;
  const Vec3& v = request.direction;
  GlobalPregrasp out;
  out.center = object.center;
  out.furthest_distance = geometry::furthest_point_along(object.samples, object.center, -v).projected_distance;

  hand::HandPose local;
  local.coefficients = theta_pre;
  const auto rest = hand::skin_vertices(asset, local);

  const Mat3 R_heading = so3::align(rest.heading, v);
  Mat3 R = R_heading;
  const auto projection = geometry::project_to_plane(object.samples.points, v);
  try {
    const auto axes = geometry::principal_axes_2d(projection.points);
    if (axes.degenerate) throw Error(ErrorCode::AxisUndefined, "isotropic cross-section");
    const Vec3 minor = projection.to_world_direction(axes.minor).normalized();
    Vec3 g = R_heading * rest.grasp_axis;
    g -= g.dot(v) * v;
    if (g.norm() < 1e-9) throw Error(ErrorCode::AxisUndefined, "grasp axis parallel to the grasp direction");
    g.normalize();
    const double to_plus = detail::signed_angle(g, minor, v);
    const double to_minus = detail::signed_angle(g, -minor, v);
    double roll = 0.0;
    if (std::abs(to_plus) < std::abs(to_minus)) {
      roll = to_plus;
    } else if (std::abs(to_minus) < std::abs(to_plus)) {
      roll = to_minus;
      out.axis_flipped = true;
    }
    out.minor_axis = minor;
    out.axis_rotation = roll;
    R = Eigen::AngleAxisd(roll, v).toRotationMatrix() * R_heading;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateSet && e.code() != ErrorCode::AxisUndefined) throw;
    out.axis_undefined = true;
  }
  out.orientation = so3::log(R);

  double clearance = request.config.clearance;
  for (int attempt = 0;; ++attempt) {
    const Vec3 wrist = object.center - v * (out.furthest_distance + clearance);
    hand::HandPose pose;
    pose.orientation = out.orientation;
    pose.coefficients = theta_pre;
    pose.translation = wrist - so3::exp(out.orientation) * asset.rest_joints[0];
    if (detail::hand_vertices_inside(asset, pose, object) == 0) {
      out.translation = pose.translation;
      out.clearance = clearance;
      out.clearance_escalations = attempt;
      return out;
    }
    if (attempt == request.config.max_clearance_doublings)
      throw Error(ErrorCode::NoCollisionFreeStandoff,
                  "hand still intersects the object at clearance " + std::to_string(clearance) + " m");
    clearance *= 2.0;
  }
}

}  // namespace graspforge::grasp

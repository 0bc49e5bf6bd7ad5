#pragma once

#include "graspforge/hand/asset.hpp"
#include "graspforge/so3.hpp"

#include <array>
#include <memory>

namespace graspforge::hand {

/// Global wrist transform (translation, rotation vector) plus pose coefficients.
struct HandPose {
  Vec3 translation = Vec3::Zero();
  Vec3 orientation = Vec3::Zero();
  Coefficients coefficients = Coefficients::Zero();

  PoseVector to_vector() const {
    PoseVector v;
    v << translation, orientation, coefficients;
    return v;
  }

  static HandPose from_vector(const PoseVector& v) {
    HandPose p;
    p.translation = v.segment<3>(0);
    p.orientation = v.segment<3>(3);
    p.coefficients = v.segment<kPcaComponents>(6);
    return p;
  }

  Rigid global() const { return Rigid::from_axis_angle(orientation, translation); }

  bool operator==(const HandPose& o) const {
    return translation == o.translation && orientation == o.orientation && coefficients == o.coefficients;
  }

  /// Same pose with the rotation vector wrapped into ||phi|| <= pi.
  HandPose canonical() const {
    HandPose p = *this;
    if (orientation.norm() > 3.141592653589793) p.orientation = so3::log(so3::exp(orientation));
    return p;
  }
};

inline HandPose flat_pose(const HandAsset& asset) {
  HandPose p;
  p.coefficients = asset.flat_coefficients;
  return p;
}

inline JointAngles pose_to_joint_angles(const HandAsset& asset, const Coefficients& theta) {
  return asset.pca_mean + asset.pca_basis * theta;
}

/// World rotation and position of every joint; optionally with derivatives
/// with respect to the 21 pose parameters.
struct JointTransforms {
  std::array<Mat3, kJoints> rotation;
  std::array<Vec3, kJoints> position;

  struct Derivatives {
    std::array<std::array<Mat3, kPoseParams>, kJoints> rotation;
    std::array<std::array<Vec3, kPoseParams>, kJoints> position;
  };
  std::shared_ptr<Derivatives> d;  // null unless requested

  /// Skinning map of joint j: rest-space point -> world.
  Vec3 apply(const HandAsset& asset, int j, const Vec3& x) const {
    const auto k = static_cast<std::size_t>(j);
    return rotation[k] * (x - asset.rest_joints[k]) + position[k];
  }
};

inline JointTransforms forward_kinematics(const HandAsset& asset, const HandPose& pose, bool with_derivatives = false) {
  JointTransforms fk;
  const JointAngles angles = pose_to_joint_angles(asset, pose.coefficients);

  fk.rotation[0] = so3::exp(pose.orientation);
  fk.position[0] = fk.rotation[0] * asset.rest_joints[0] + pose.translation;
  for (int j = 1; j < kJoints; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const auto parent = static_cast<std::size_t>(asset.parents[k]);
    const Vec3 a = angles.segment<3>(3 * (j - 1));
    fk.rotation[k] = fk.rotation[parent] * so3::exp(a);
    fk.position[k] = fk.rotation[parent] * (asset.rest_joints[k] - asset.rest_joints[parent]) + fk.position[parent];
  }
  if (!with_derivatives) return fk;

  fk.d = std::make_shared<JointTransforms::Derivatives>();
  auto& dR = fk.d->rotation;
  auto& dp = fk.d->position;
  {
    const auto dexp = so3::dexp(pose.orientation);
    for (int q = 0; q < kPoseParams; ++q) {
      dR[0][static_cast<std::size_t>(q)].setZero();
      dp[0][static_cast<std::size_t>(q)].setZero();
    }
    for (int i = 0; i < 3; ++i) {
      dp[0][static_cast<std::size_t>(i)] = Vec3::Unit(i);
      dR[0][static_cast<std::size_t>(3 + i)] = dexp[static_cast<std::size_t>(i)];
      dp[0][static_cast<std::size_t>(3 + i)] = dexp[static_cast<std::size_t>(i)] * asset.rest_joints[0];
    }
  }
  for (int j = 1; j < kJoints; ++j) {
    const auto k = static_cast<std::size_t>(j);
    const auto parent = static_cast<std::size_t>(asset.parents[k]);
    const Vec3 a = angles.segment<3>(3 * (j - 1));
    const Mat3 local = so3::exp(a);
    const auto dlocal = so3::dexp(a);
    const Vec3 offset = asset.rest_joints[k] - asset.rest_joints[parent];
    for (int q = 0; q < kPoseParams; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      Mat3 r = dR[parent][qi] * local;
      if (q >= 6) {
        // d local / d theta_c = sum_i dexp_i * B(row_i, c)
        Mat3 dl = Mat3::Zero();
        for (int i = 0; i < 3; ++i) dl += dlocal[static_cast<std::size_t>(i)] * asset.pca_basis(3 * (j - 1) + i, q - 6);
        r += fk.rotation[parent] * dl;
      }
      dR[k][qi] = r;
      dp[k][qi] = dR[parent][qi] * offset + dp[parent][qi];
    }
  }
  return fk;
}

/// Skinned geometry and landmarks for one pose.
struct HandState {
  Points3 vertices;
  std::array<Vec3, kJoints> joints{};
  std::array<Vec3, kFingertips> fingertips{};
  Vec3 grasp_axis = Vec3::UnitX();  // thumb tip -> middle tip
  Vec3 heading = Vec3::UnitZ();     // wrist -> midpoint(thumb tip, middle tip)

  Vec3 wrist() const { return joints[0]; }
};

inline void update_landmarks(const HandAsset& asset, HandState& s) {
  for (int f = 0; f < kFingertips; ++f)
    s.fingertips[static_cast<std::size_t>(f)] = s.vertices[static_cast<std::size_t>(asset.fingertips[static_cast<std::size_t>(f)])];
  const Vec3& thumb = s.fingertips[Thumb];
  const Vec3& middle = s.fingertips[Middle];
  s.grasp_axis = (middle - thumb).normalized();
  s.heading = (0.5 * (thumb + middle) - s.joints[0]).normalized();
}

inline HandState skin_vertices(const HandAsset& asset, const JointTransforms& fk) {
  HandState s;
  const std::size_t V = asset.vertex_count();
  s.vertices.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    Vec3 acc = Vec3::Zero();
    for (int j = 0; j < kJoints; ++j) {
      const double w = asset.skin_weights(static_cast<Eigen::Index>(v), j);
      if (w != 0.0) acc += w * fk.apply(asset, j, asset.template_vertices[v]);
    }
    s.vertices[v] = acc;
  }
  for (int j = 0; j < kJoints; ++j) s.joints[static_cast<std::size_t>(j)] = fk.position[static_cast<std::size_t>(j)];
  update_landmarks(asset, s);
  return s;
}

inline HandState skin_vertices(const HandAsset& asset, const HandPose& pose) {
  return skin_vertices(asset, forward_kinematics(asset, pose));
}

/// d(vertex)/d(pose) as a 3 x 21 matrix. Requires `fk` built with derivatives.
inline Eigen::Matrix<double, 3, kPoseParams> vertex_jacobian(const HandAsset& asset, const JointTransforms& fk,
                                                             std::size_t v) {
  Eigen::Matrix<double, 3, kPoseParams> J = Eigen::Matrix<double, 3, kPoseParams>::Zero();
  for (int j = 0; j < kJoints; ++j) {
    const double w = asset.skin_weights(static_cast<Eigen::Index>(v), j);
    if (w == 0.0) continue;
    const auto k = static_cast<std::size_t>(j);
    const Vec3 local = asset.template_vertices[v] - asset.rest_joints[k];
    for (int q = 0; q < kPoseParams; ++q)
      J.col(q) += w * (fk.d->rotation[k][static_cast<std::size_t>(q)] * local + fk.d->position[k][static_cast<std::size_t>(q)]);
  }
  return J;
}

/// Chain rule from per-vertex gradients (and a direct wrist-joint gradient)
/// back to the 21 pose parameters. Requires `fk` built with derivatives.
inline PoseVector backpropagate(const HandAsset& asset, const JointTransforms& fk, const Points3& grad_vertices,
                                const Vec3& grad_wrist = Vec3::Zero()) {
  std::array<Mat3, kJoints> gR;
  std::array<Vec3, kJoints> gp;
  for (int j = 0; j < kJoints; ++j) {
    gR[static_cast<std::size_t>(j)].setZero();
    gp[static_cast<std::size_t>(j)].setZero();
  }
  for (std::size_t v = 0; v < grad_vertices.size(); ++v) {
    const Vec3& g = grad_vertices[v];
    if (g.isZero(0.0)) continue;
    for (int j = 0; j < kJoints; ++j) {
      const double w = asset.skin_weights(static_cast<Eigen::Index>(v), j);
      if (w == 0.0) continue;
      const auto k = static_cast<std::size_t>(j);
      gR[k] += (w * g) * (asset.template_vertices[v] - asset.rest_joints[k]).transpose();
      gp[k] += w * g;
    }
  }
  gp[0] += grad_wrist;

  PoseVector grad = PoseVector::Zero();
  for (int j = 0; j < kJoints; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (gR[k].isZero(0.0) && gp[k].isZero(0.0)) continue;
    for (int q = 0; q < kPoseParams; ++q) {
      const auto qi = static_cast<std::size_t>(q);
      grad[q] += (gR[k].array() * fk.d->rotation[k][qi].array()).sum() + gp[k].dot(fk.d->position[k][qi]);
    }
  }
  return grad;
}

/// y-coordinate of the thumb tip with zero global transform.
inline double thumb_tip_y(const HandAsset& asset, const Coefficients& theta) {
  HandPose p;
  p.coefficients = theta;
  return skin_vertices(asset, p).fingertips[Thumb].y();
}

}  // namespace graspforge::hand

#pragma once

#include "graspforge/hand/kinematics.hpp"

// Reflection across the x = 0 plane, M = diag(-1, 1, 1).
// Points map to M p and rotations to M R M; the rotation vector of M R M is
// (a_x, -a_y, -a_z) for a rotation vector a.

namespace graspforge::hand {

inline Vec3 mirror_point(const Vec3& p) { return {-p.x(), p.y(), p.z()}; }
inline Vec3 mirror_rotation_vector(const Vec3& a) { return {a.x(), -a.y(), -a.z()}; }

inline Mat3 mirror_rotation(const Mat3& R) {
  const Mat3 M = Eigen::Vector3d(-1.0, 1.0, 1.0).asDiagonal();
  return M * R * M;
}

inline Rigid mirror(const Rigid& T) { return {mirror_rotation(T.R), mirror_point(T.t)}; }

inline HandPose mirror(const HandPose& p) {
  HandPose out = p;
  out.translation = mirror_point(p.translation);
  out.orientation = mirror_rotation_vector(p.orientation);
  return out;
}

inline HandAsset mirror(const HandAsset& a) {
  HandAsset out = a;
  for (auto& v : out.template_vertices) v = mirror_point(v);
  for (auto& j : out.rest_joints) j = mirror_point(j);
  for (auto& f : out.faces) std::swap(f[1], f[2]);
  for (int j = 0; j < kJoints - 1; ++j) {
    out.pca_mean.segment<2>(3 * j + 1) *= -1.0;
    out.pca_basis.middleRows<2>(3 * j + 1) *= -1.0;
  }
  out.chirality = flipped(a.chirality);
  return out;
}

inline HandState mirror(const HandState& s) {
  HandState out = s;
  for (auto& v : out.vertices) v = mirror_point(v);
  for (auto& j : out.joints) j = mirror_point(j);
  for (auto& f : out.fingertips) f = mirror_point(f);
  out.grasp_axis = mirror_point(s.grasp_axis);
  out.heading = mirror_point(s.heading);
  return out;
}

}  // namespace graspforge::hand

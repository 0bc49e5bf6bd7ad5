#pragma once

#include "graspforge/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace graspforge::so3 {

inline Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

/// Rodrigues map from a rotation vector (axis * angle) to a rotation matrix.
inline Mat3 exp(const Vec3& v) {
  const double angle = v.norm();
  if (angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
}

/// Picks the lexicographically smaller of {axis, -axis}; used when the angle is pi.
inline Vec3 canonical_half_turn_axis(const Vec3& axis) {
  for (int i = 0; i < 3; ++i) {
    if (axis[i] < 0.0) return axis;
    if (axis[i] > 0.0) return -axis;
  }
  return axis;
}

/// Inverse of exp with ||result|| in [0, pi].
inline Vec3 log(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  double angle = aa.angle();
  Vec3 axis = aa.axis();
  if (angle > std::numbers::pi) {
    angle = 2.0 * std::numbers::pi - angle;
    axis = -axis;
  }
  if (angle == 0.0) return Vec3::Zero();
  if (std::numbers::pi - angle < 1e-12) axis = canonical_half_turn_axis(axis);
  return axis * angle;
}

/// Partial derivatives dR/dv_i of exp(v).
///
/// Closed form: dR/dv_i = (v_i [v]x + [v x (I - R) e_i]x) R / |v|^2,
/// reducing to [e_i]x at the origin.
inline std::array<Mat3, 3> dexp(const Vec3& v) {
  std::array<Mat3, 3> d;
  const double n2 = v.squaredNorm();
  if (n2 < 1e-20) {
    for (int i = 0; i < 3; ++i) d[i] = hat(Vec3::Unit(i));
    return d;
  }
  const Mat3 R = exp(v);
  const Mat3 I_minus_R = Mat3::Identity() - R;
  const Mat3 vx = hat(v);
  for (int i = 0; i < 3; ++i) {
    const Vec3 w = v.cross(I_minus_R.col(i));
    d[i] = (v[i] * vx + hat(w)) * R / n2;
  }
  return d;
}

inline double angle_between(const Mat3& a, const Mat3& b) { return log(a.transpose() * b).norm(); }

/// Smallest rotation taking unit vector `from` onto unit vector `to`.
inline Mat3 align(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const Vec3 c = a.cross(b);
  const double s = c.norm();
  const double cosang = std::clamp(a.dot(b), -1.0, 1.0);
  if (s < 1e-15) {
    if (cosang > 0.0) return Mat3::Identity();
    // Antiparallel: half turn about any axis orthogonal to `a`.
    Vec3 ortho = a.cross(Vec3::UnitX());
    if (ortho.norm() < 1e-6) ortho = a.cross(Vec3::UnitY());
    return Eigen::AngleAxisd(std::numbers::pi, ortho.normalized()).toRotationMatrix();
  }
  return Eigen::AngleAxisd(std::atan2(s, cosang), c / s).toRotationMatrix();
}

}  // namespace graspforge::so3

namespace graspforge {

/// Rigid transform x -> R x + t.
struct Rigid {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Rigid identity() { return {}; }
  static Rigid from_axis_angle(const Vec3& rotvec, const Vec3& translation) {
    return {so3::exp(rotvec), translation};
  }

  Vec3 operator()(const Vec3& x) const { return R * x + t; }
  Rigid operator*(const Rigid& o) const { return {R * o.R, R * o.t + t}; }
  Rigid inverse() const { return {R.transpose(), -(R.transpose() * t)}; }
  Vec3 rotvec() const { return so3::log(R); }
};

/// Translation linear, rotation along the geodesic with constant angular velocity.
inline Rigid interpolate_rigid(const Rigid& a, const Rigid& b, double s) {
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  const Vec3 delta = so3::log(a.R.transpose() * b.R);
  return {a.R * so3::exp(s * delta), (1.0 - s) * a.t + s * b.t};
}

}  // namespace graspforge

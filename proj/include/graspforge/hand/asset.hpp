#pragma once

#include "graspforge/core.hpp"
#include "graspforge/geometry/mesh.hpp"

#include <Eigen/QR>

#include <array>
#include <string>

namespace graspforge::hand {

inline constexpr int kJoints = 16;
inline constexpr int kJointAngles = 45;
inline constexpr int kPcaComponents = 15;
inline constexpr int kPoseParams = 21;  // translation (3) + orientation (3) + coefficients (15)
inline constexpr int kFingertips = 5;

using Coefficients = Eigen::Matrix<double, kPcaComponents, 1>;
using JointAngles = Eigen::Matrix<double, kJointAngles, 1>;
using PoseBasis = Eigen::Matrix<double, kJointAngles, kPcaComponents>;
using PoseVector = Eigen::Matrix<double, kPoseParams, 1>;

enum class Chirality { Right, Left };

inline const char* to_string(Chirality c) { return c == Chirality::Right ? "right" : "left"; }
inline Chirality chirality_from_string(const std::string& s) {
  if (s == "right") return Chirality::Right;
  if (s == "left") return Chirality::Left;
  throw Error(ErrorCode::ParseError, "unknown chirality '" + s + "'");
}
inline Chirality flipped(Chirality c) { return c == Chirality::Right ? Chirality::Left : Chirality::Right; }

/// Fingertip landmark slots.
enum Finger : int { Thumb = 0, Index = 1, Middle = 2, Ring = 3, Pinky = 4 };

/// Parametric skinned hand. Joint 0 is the wrist; joints 1..15 carry three
/// rotation DoF each, in the order used by the pose basis rows.
struct HandAsset {
  Points3 template_vertices;
  std::vector<geometry::Triangle> faces;
  std::array<int, kJoints> parents{};
  std::array<Vec3, kJoints> rest_joints{};
  Eigen::MatrixXd skin_weights;  // V x J
  JointAngles pca_mean = JointAngles::Zero();
  PoseBasis pca_basis = PoseBasis::Zero();
  Coefficients flat_coefficients = Coefficients::Zero();
  std::array<int, kFingertips> fingertips{};
  std::vector<std::uint8_t> contact_mask;  // candidate vertices for the contact loss
  std::vector<std::uint8_t> palmar_mask;   // palm-region vertices on the palmar surface
  Chirality chirality = Chirality::Right;

  std::size_t vertex_count() const { return template_vertices.size(); }

  /// Wrist joint to middle fingertip in the rest pose.
  double hand_length() const {
    return (template_vertices[static_cast<std::size_t>(fingertips[Middle])] - rest_joints[0]).norm();
  }
};

/// Throws InvalidArgument describing the first violated asset invariant.
inline void validate(const HandAsset& a) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "hand asset: " + what); };
  const auto V = static_cast<Eigen::Index>(a.template_vertices.size());
  if (V == 0) fail("no vertices");
  if (a.skin_weights.rows() != V || a.skin_weights.cols() != kJoints) fail("skin weights must be V x 16");
  if (a.contact_mask.size() != a.template_vertices.size()) fail("contact mask size mismatch");
  if (a.palmar_mask.size() != a.template_vertices.size()) fail("palmar mask size mismatch");
  for (const auto& f : a.faces)
    for (int idx : f)
      if (idx < 0 || idx >= V) fail("face index out of range");
  for (int tip : a.fingertips)
    if (tip < 0 || tip >= V) fail("fingertip index out of range");
  for (Eigen::Index v = 0; v < V; ++v) {
    if ((a.skin_weights.row(v).array() < 0.0).any()) fail("negative skinning weight");
    if (std::abs(a.skin_weights.row(v).sum() - 1.0) > 1e-6) fail("skinning weights must sum to 1");
  }
  if (a.parents[0] != -1) fail("joint 0 must be the root");
  for (int j = 1; j < kJoints; ++j) {
    // Parents precede children, which rules out cycles and disconnected joints.
    if (a.parents[static_cast<std::size_t>(j)] < 0 || a.parents[static_cast<std::size_t>(j)] >= j)
      fail("kinematic tree must list parents before children");
  }
  Eigen::ColPivHouseholderQR<PoseBasis> qr(a.pca_basis);
  qr.setThreshold(1e-10);
  if (qr.rank() != kPcaComponents) fail("pose basis columns are linearly dependent");
  if (!a.pca_mean.allFinite() || !a.pca_basis.allFinite() || !a.flat_coefficients.allFinite())
    fail("non-finite pose parameters");
}

}  // namespace graspforge::hand

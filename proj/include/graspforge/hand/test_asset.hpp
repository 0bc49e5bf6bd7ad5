#pragma once

#include "graspforge/hand/asset.hpp"

#include <map>
#include <tuple>

// Procedural right hand used by the tests and by `--hand test`.
//
// Frame: wrist joint at the origin, fingers along +z, palm normal -y, thumb on
// the +x side. Every part is a subdivided box whose palmar face lies in y = 0
// in the flat pose; the parts are separate closed surfaces. Joint rotations
// rotate about the joint centres at mid-thickness.

namespace graspforge::hand {

namespace detail {

struct BoxPart {
  Vec3 base;       // palmar face, centre of the proximal edge
  Vec3 length_axis;
  Vec3 width_axis;
  Vec3 thickness_axis;  // points away from the pad face
  double length, width, thickness;
  int nl, nw, nt;  // subdivisions
  int joint;
  int parent;      // blended near the proximal end; -1 for rigid
  bool pad;        // fingertip segment: the distal pad centre line becomes contact candidates
};

struct PartVertices {
  std::map<std::tuple<int, int, int>, int> ids;
};

inline int add_part(HandAsset& a, std::vector<std::array<double, kJoints>>& weights, const BoxPart& p,
                    std::vector<std::uint8_t>& contact, std::vector<std::uint8_t>& palmar) {
  std::map<std::tuple<int, int, int>, int> ids;
  auto vertex = [&](int i, int j, int k) {
    auto key = std::make_tuple(i, j, k);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const double s = static_cast<double>(i) / p.nl;
    const Vec3 pos = p.base + s * p.length * p.length_axis +
                     (static_cast<double>(j) / p.nw - 0.5) * p.width * p.width_axis +
                     static_cast<double>(k) / p.nt * p.thickness * p.thickness_axis;
    const int id = static_cast<int>(a.template_vertices.size());
    a.template_vertices.push_back(pos);
    std::array<double, kJoints> w{};
    constexpr double kBlend = 0.2;
    if (p.parent >= 0 && s < kBlend) {
      const double wp = 0.5 * (1.0 - s / kBlend);
      w[static_cast<std::size_t>(p.parent)] = wp;
      w[static_cast<std::size_t>(p.joint)] = 1.0 - wp;
    } else {
      w[static_cast<std::size_t>(p.joint)] = 1.0;
    }
    weights.push_back(w);
    // Only the pad centre line near the tip: a whole-face mask cannot lie flat on curved
    // objects without finger roll, and the squared pull then buries one edge.
    contact.push_back(p.pad && k == 0 && 2 * j == p.nw && 3 * i >= 2 * p.nl ? 1 : 0);
    palmar.push_back(k == 0 && p.joint == 0 ? 1 : 0);
    ids.emplace(key, id);
    return id;
  };

  const Vec3 center = p.base + 0.5 * p.length * p.length_axis + 0.5 * p.thickness * p.thickness_axis;
  auto emit_quad = [&](int v0, int v1, int v2, int v3) {
    const Vec3& a0 = a.template_vertices[static_cast<std::size_t>(v0)];
    const Vec3 n = (a.template_vertices[static_cast<std::size_t>(v1)] - a0)
                       .cross(a.template_vertices[static_cast<std::size_t>(v2)] - a0);
    const Vec3 mid = 0.25 * (a0 + a.template_vertices[static_cast<std::size_t>(v1)] +
                             a.template_vertices[static_cast<std::size_t>(v2)] +
                             a.template_vertices[static_cast<std::size_t>(v3)]);
    if (n.dot(mid - center) >= 0.0) {
      a.faces.push_back({v0, v1, v2});
      a.faces.push_back({v0, v2, v3});
    } else {
      a.faces.push_back({v0, v2, v1});
      a.faces.push_back({v0, v3, v2});
    }
  };

  // Two faces per axis, each a grid over the other two axes.
  const std::array<int, 3> n{p.nl, p.nw, p.nt};
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
    for (int side : {0, n[static_cast<std::size_t>(axis)]}) {
      for (int iu = 0; iu < n[static_cast<std::size_t>(u)]; ++iu)
        for (int iv = 0; iv < n[static_cast<std::size_t>(v)]; ++iv) {
          auto at = [&](int du, int dv) {
            std::array<int, 3> c{};
            c[static_cast<std::size_t>(axis)] = side;
            c[static_cast<std::size_t>(u)] = iu + du;
            c[static_cast<std::size_t>(v)] = iv + dv;
            return vertex(c[0], c[1], c[2]);
          };
          emit_quad(at(0, 0), at(1, 0), at(1, 1), at(0, 1));
        }
    }
  }
  // Palmar edge midpoint of the distal face.
  return vertex(p.nl, p.nw / 2, 0);
}

}  // namespace detail

/// Builds the 16-joint procedural hand (~1k vertices) with a synthetic pose basis.
inline HandAsset build_test_asset() {
  HandAsset a;
  std::vector<std::array<double, kJoints>> weights;
  std::vector<std::uint8_t> contact, palmar;

  // Joint order: 0 wrist; index 1-3; middle 4-6; pinky 7-9; ring 10-12; thumb 13-15.
  a.parents = {-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 0, 10, 11, 0, 13, 14};
  a.rest_joints[0] = Vec3::Zero();

  constexpr double kFingerWidth = 0.018;
  constexpr double kFingerThickness = 0.016;
  const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();

  detail::add_part(a, weights, {Vec3::Zero(), Z, X, Y, 0.09, 0.084, 0.022, 8, 8, 2, 0, -1, false}, contact, palmar);

  struct FingerSpec {
    double x, z0;
    std::array<double, 3> lengths;
    int first_joint;
    int tip_slot;
  };
  const std::array<FingerSpec, 4> fingers = {{
      {0.030, 0.088, {0.042, 0.026, 0.022}, 1, Index},
      {0.010, 0.090, {0.046, 0.029, 0.024}, 4, Middle},
      {-0.030, 0.082, {0.034, 0.021, 0.020}, 7, Pinky},
      {-0.010, 0.088, {0.043, 0.027, 0.023}, 10, Ring},
  }};
  for (const auto& f : fingers) {
    double z = f.z0;
    int tip = -1;
    for (int s = 0; s < 3; ++s) {
      const int joint = f.first_joint + s;
      const int parent = s == 0 ? 0 : joint - 1;
      a.rest_joints[static_cast<std::size_t>(joint)] = Vec3(f.x, 0.5 * kFingerThickness, z);
      const int nl = s == 0 ? 4 : 3;
      tip = detail::add_part(a, weights,
                             {Vec3(f.x, 0.0, z), Z, X, Y, f.lengths[static_cast<std::size_t>(s)], kFingerWidth,
                              kFingerThickness, nl, 2, 2, joint, parent, s == 2},
                             contact, palmar);
      z += f.lengths[static_cast<std::size_t>(s)];
    }
    a.fingertips[static_cast<std::size_t>(f.tip_slot)] = tip;
  }

  // Thumb: rooted inside the palm near its radial base, angled toward +x, pad facing medially.
  const Vec3 thumb_dir = Vec3(0.55, 0.0, 0.835).normalized();
  const Vec3 thumb_lateral = Vec3(thumb_dir.z(), 0.0, -thumb_dir.x());
  {
    const std::array<double, 3> lengths = {0.0405, 0.0288, 0.0252};
    Vec3 base(0.030, 0.0, 0.015);
    int tip = -1;
    for (int s = 0; s < 3; ++s) {
      const int joint = 13 + s;
      const int parent = s == 0 ? 0 : joint - 1;
      a.rest_joints[static_cast<std::size_t>(joint)] = base + 0.5 * kFingerThickness * thumb_lateral;
      tip = detail::add_part(a, weights,
                             {base, thumb_dir, Y, thumb_lateral, lengths[static_cast<std::size_t>(s)], 0.020,
                              kFingerThickness, s == 0 ? 4 : 3, 2, 2, joint, parent, s == 2},
                             contact, palmar);
      base += lengths[static_cast<std::size_t>(s)] * thumb_dir;
    }
    a.fingertips[Thumb] = tip;
  }

  a.skin_weights.resize(static_cast<Eigen::Index>(weights.size()), kJoints);
  for (std::size_t v = 0; v < weights.size(); ++v)
    for (int j = 0; j < kJoints; ++j) a.skin_weights(static_cast<Eigen::Index>(v), j) = weights[v][static_cast<std::size_t>(j)];
  a.contact_mask = std::move(contact);
  a.palmar_mask = std::move(palmar);

  // Synthetic pose basis: rows 3(j-1)..3(j-1)+2 hold joint j's rotation vector.
  auto put = [&](int component, int joint, const Vec3& rotvec) {
    a.pca_basis.block<3, 1>(3 * (joint - 1), component) += rotvec;
  };
  const std::array<int, 4> mcp = {1, 4, 10, 7};  // index, middle, ring, pinky
  auto curl = [&](int component, int finger, double m, double p, double d) {
    put(component, mcp[static_cast<std::size_t>(finger)], m * X);
    put(component, mcp[static_cast<std::size_t>(finger)] + 1, p * X);
    put(component, mcp[static_cast<std::size_t>(finger)] + 2, d * X);
  };

  // 0: thumb opposition with a little finger flexion
  put(0, 13, 1.2 * thumb_lateral - 1.5 * thumb_dir);
  for (int f = 0; f < 4; ++f) curl(0, f, 0.1, 0.05, 0.0);
  // 1: four-finger power curl
  for (int f = 0; f < 4; ++f) curl(1, f, 0.45, 0.55 + 0.03 * f, 0.4);
  // 2: thumb curl
  put(2, 14, -0.5 * Y);
  put(2, 15, -0.5 * Y);
  for (int f = 0; f < 4; ++f) curl(2, f, 0.05, 0.1, 0.05);
  // 3: spread
  put(3, 1, 0.2 * Y);
  put(3, 4, 0.05 * Y);
  put(3, 10, -0.1 * Y);
  put(3, 7, -0.25 * Y);
  // 4-7: individual finger curls
  for (int f = 0; f < 4; ++f) curl(4 + f, f, 0.4, 0.4, 0.3);
  // 8: thumb swing toward the palm centre with pronation
  put(8, 13, 0.5 * thumb_lateral);
  // 9: MCP-only flexion
  for (int f = 0; f < 4; ++f) curl(9, f, 0.5, 0.0, 0.0);
  // 10: PIP/DIP claw
  for (int f = 0; f < 4; ++f) curl(10, f, 0.0, 0.5, 0.4);
  // 11, 12: index / pinky abduction
  put(11, 1, 0.3 * Y);
  put(12, 7, -0.3 * Y);
  // 13: thumb interphalangeal
  put(13, 15, -0.6 * Y);
  // 14: thumb pronation with CMC and MCP flexion
  put(14, 13, -0.4 * thumb_dir);
  put(14, 14, 0.2 * thumb_lateral);

  // The mean is a slightly curled pose; the flat pose sits at -m in PCA space.
  Coefficients m = Coefficients::Zero();
  m[0] = 0.1;
  m[1] = 0.2;
  a.pca_mean = a.pca_basis * m;
  a.flat_coefficients = -m;
  a.chirality = Chirality::Right;
  return a;
}

}  // namespace graspforge::hand

#pragma once

#include "graspforge/grasp/request.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace graspforge::grasp {

struct LossBreakdown {
  double penetration = 0.0;  // L_DP
  double contact = 0.0;      // L_C
  double fingertip = 0.0;    // L_DF (negative while k < 0)
  double control = 0.0;      // L_Ctrl
  double total = 0.0;
  std::size_t object_points_in_hand = 0;
  std::size_t hand_vertices_in_object = 0;
  Vec3 wrist_vector = Vec3::UnitZ();  // unit, wrist -> object centre
};

inline void to_json(nlohmann::json& j, const LossBreakdown& l) {
  j = {{"penetration", l.penetration},
       {"contact", l.contact},
       {"fingertip", l.fingertip},
       {"control", l.control},
       {"total", l.total},
       {"object_points_in_hand", l.object_points_in_hand},
       {"hand_vertices_in_object", l.hand_vertices_in_object},
       {"wrist_vector", {l.wrist_vector.x(), l.wrist_vector.y(), l.wrist_vector.z()}}};
}

inline void from_json(const nlohmann::json& j, LossBreakdown& l) {
  l.penetration = j.at("penetration").get<double>();
  l.contact = j.at("contact").get<double>();
  l.fingertip = j.at("fingertip").get<double>();
  l.control = j.at("control").get<double>();
  l.total = j.at("total").get<double>();
  l.object_points_in_hand = j.at("object_points_in_hand").get<std::size_t>();
  l.hand_vertices_in_object = j.at("hand_vertices_in_object").get<std::size_t>();
  const auto w = j.at("wrist_vector").get<std::array<double, 3>>();
  l.wrist_vector = Vec3(w[0], w[1], w[2]);
}

/// Discrete assignments of one step; held fixed while differentiating.
struct Correspondences {
  struct Pair {
    std::size_t from;  // object sample (object_in_hand) or hand vertex (hand_in_object, contact)
    std::size_t to;    // nearest hand vertex / nearest object sample; unused for contact
    Vec3 target;       // fixed partner position
  };
  std::vector<Pair> object_in_hand;  // object samples inside the hand -> nearest hand vertex
  std::vector<Pair> hand_in_object;  // hand vertices inside the object -> nearest object sample
  std::vector<Pair> contact;         // contact-candidate vertex -> closest object surface point
  double k = 0.0;                    // dynamic fingertip coefficient of this step
};

inline Correspondences find_correspondences(const GraspRequest& request, const hand::HandState& state, int step) {
  const auto& asset = *request.asset;
  const auto& object = *request.object;
  Correspondences c;
  c.k = request.config.dynamic_coefficient(step);

  const geometry::TriangleBvh hand_bvh(state.vertices, asset.faces);
  std::unique_ptr<geometry::PointKdTree> hand_tree;
  const auto& samples = object.samples.points;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!geometry::point_inside(hand_bvh, request.hand_closed, samples[i])) continue;
    if (!hand_tree) hand_tree = std::make_unique<geometry::PointKdTree>(state.vertices);
    const auto nearest = hand_tree->nearest(samples[i]);
    c.object_in_hand.push_back({i, static_cast<std::size_t>(nearest.index), samples[i]});
  }
  for (std::size_t v = 0; v < state.vertices.size(); ++v) {
    if (!object.index.inside(state.vertices[v])) continue;
    const auto nearest = object.index.nearest_sample(state.vertices[v]);
    c.hand_in_object.push_back({v, static_cast<std::size_t>(nearest.index), samples[static_cast<std::size_t>(nearest.index)]});
  }
  for (std::size_t v = 0; v < state.vertices.size(); ++v) {
    if (!request.config.contact_all_vertices && !asset.contact_mask[v]) continue;
    c.contact.push_back({v, 0, object.index.closest(state.vertices[v]).point});
  }
  return c;
}

namespace detail {

// Gradients of the frozen-correspondence loss with respect to hand vertices and the wrist.
struct LossGradients {
  Points3 vertices;
  Vec3 wrist = Vec3::Zero();
};

}  // namespace detail

/// Loss of `state` under frozen correspondences; optionally accumulates vertex/wrist gradients.
inline LossBreakdown evaluate_losses(const GraspRequest& request, const hand::HandState& state,
                                     const Correspondences& c, detail::LossGradients* grads = nullptr) {
  const auto& asset = *request.asset;
  const auto& cfg = request.config;
  LossBreakdown l;
  if (grads) {
    grads->vertices.assign(state.vertices.size(), Vec3::Zero());
    grads->wrist.setZero();
  }

  // Dual penetration: object points pulled to their hand vertex, hand vertices pushed to object samples.
  for (const auto& p : c.object_in_hand) {
    const Vec3 d = state.vertices[p.to] - p.target;
    l.penetration += d.squaredNorm();
    if (grads) grads->vertices[p.to] += cfg.alpha * 2.0 * d;
  }
  for (const auto& p : c.hand_in_object) {
    const Vec3 d = state.vertices[p.from] - p.target;
    l.penetration += d.squaredNorm();
    if (grads) grads->vertices[p.from] += cfg.alpha * 2.0 * d;
  }
  l.object_points_in_hand = c.object_in_hand.size();
  l.hand_vertices_in_object = c.hand_in_object.size();

  for (const auto& p : c.contact) {
    const Vec3 d = state.vertices[p.from] - p.target;
    l.contact += d.squaredNorm();
    if (grads) grads->vertices[p.from] += cfg.beta * 2.0 * d;
  }

  const auto thumb = static_cast<std::size_t>(asset.fingertips[hand::Thumb]);
  for (int f = hand::Index; f < hand::kFingertips; ++f) {
    const auto tip = static_cast<std::size_t>(asset.fingertips[static_cast<std::size_t>(f)]);
    const Vec3 d = state.vertices[thumb] - state.vertices[tip];
    l.fingertip += c.k * d.squaredNorm();
    if (grads) {
      grads->vertices[thumb] += cfg.gamma * c.k * 2.0 * d;
      grads->vertices[tip] -= cfg.gamma * c.k * 2.0 * d;
    }
  }

  const Vec3 v = request.object->center - state.wrist();
  const double len = v.norm();
  const Vec3 g = request.direction;
  if (len > 0.0) {
    l.wrist_vector = v / len;
    const double cosine = std::clamp(l.wrist_vector.dot(g), -1.0, 1.0);
    l.control = 1.0 - cosine;
    // d(1 - cos)/d(wrist) with v = centre - wrist.
    if (grads) grads->wrist += cfg.delta * (g - cosine * l.wrist_vector) / len;
  } else {
    l.control = 1.0;
  }

  l.total = cfg.alpha * l.penetration + cfg.beta * l.contact + cfg.gamma * l.fingertip + cfg.delta * l.control;
  return l;
}

inline LossBreakdown grasp_losses(const GraspRequest& request, const hand::HandState& state, int step) {
  return evaluate_losses(request, state, find_correspondences(request, state, step));
}

struct LossWithGradient {
  LossBreakdown loss;
  hand::PoseVector gradient = hand::PoseVector::Zero();
};

/// Total loss and its gradient over (tau, phi, theta) with this step's correspondences frozen.
inline LossWithGradient loss_gradient(const GraspRequest& request, const hand::HandPose& pose, int step,
                                      const Correspondences* frozen = nullptr) {
  const auto fk = hand::forward_kinematics(*request.asset, pose, true);
  const auto state = hand::skin_vertices(*request.asset, fk);
  Correspondences own;
  if (!frozen) {
    own = find_correspondences(request, state, step);
    frozen = &own;
  }
  detail::LossGradients grads;
  LossWithGradient out;
  out.loss = evaluate_losses(request, state, *frozen, &grads);
  out.gradient = hand::backpropagate(*request.asset, fk, grads.vertices, grads.wrist);
  return out;
}

}  // namespace graspforge::grasp

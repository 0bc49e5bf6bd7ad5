#pragma once

#include "graspforge/grasp/losses.hpp"
#include "graspforge/grasp/pregrasp.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace graspforge::grasp {

struct QualityReport {
  double max_penetration = 0.0;       // deepest hand vertex inside the object (m)
  std::size_t contact_count = 0;      // contact candidates within the contact threshold of the surface
  double direction_deviation = 0.0;   // angle between wrist->centre and v_grasp (deg)
};

/// Geometric quality of a hand pose against the object; a pure function of its inputs.
inline QualityReport evaluate_quality(const hand::HandAsset& asset, const GraspObject& object, const Vec3& direction,
                                      const hand::HandPose& pose, double contact_threshold) {
  const auto state = hand::skin_vertices(asset, pose);
  QualityReport q;
  for (std::size_t v = 0; v < state.vertices.size(); ++v) {
    const double sd = geometry::signed_distance(state.vertices[v], object.index);
    if (sd < 0.0) q.max_penetration = std::max(q.max_penetration, -sd);
    if (asset.contact_mask[v] && std::abs(sd) <= contact_threshold) ++q.contact_count;
  }
  const Vec3 w = object.center - state.wrist();
  const double c = std::clamp(w.normalized().dot(direction.normalized()), -1.0, 1.0);
  q.direction_deviation = std::acos(c) * 180.0 / std::numbers::pi;
  return q;
}

/// Where the object came from; enough to rebuild it for re-evaluation.
struct GraspProvenance {
  std::string mesh;             // mesh path, or a primitive description
  double scale = 1.0;
  std::uint64_t seed = 0;       // surface sampling seed
  std::size_t sample_count = 0;
  std::string hand = "test";    // hand asset path, or "test"
};

struct GraspKeyframes {
  hand::HandPose pre;
  hand::HandPose grasp;
  LossBreakdown final_loss;
  QualityReport quality;
  std::vector<double> trace;  // total loss per refinement step
  GlobalPregrasp pregrasp;
  Vec3 direction = Vec3::UnitZ();
  hand::Chirality chirality = hand::Chirality::Right;
  OptimizerConfig config;
  GraspProvenance provenance;
};

/// Raised when the loss or gradient stops being finite; carries the trace so far.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, std::vector<double> trace)
      : Error(ErrorCode::NonFinite, what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

inline GraspKeyframes optimize_grasp(const GraspRequest& request) {
  const auto& cfg = request.config;
  GraspKeyframes out;
  out.direction = request.direction;
  out.chirality = request.asset->chirality;
  out.config = cfg;
  out.provenance.sample_count = request.object->samples.size();

  const hand::Coefficients theta_pre = optimize_finger_pregrasp(*request.asset, cfg);
  out.pregrasp = compute_global_pregrasp(request, theta_pre);
  out.pre.translation = out.pregrasp.translation;
  out.pre.orientation = out.pregrasp.orientation;
  out.pre.coefficients = theta_pre;

  hand::PoseVector params = out.pre.to_vector();
  AdamState adam;
  const AdamParams hp{cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon};
  out.trace.reserve(static_cast<std::size_t>(cfg.steps));
  for (int step = 0; step < cfg.steps; ++step) {
    const auto lg = loss_gradient(request, hand::HandPose::from_vector(params), step);
    out.trace.push_back(lg.loss.total);
    if (!std::isfinite(lg.loss.total) || !lg.gradient.allFinite())
      throw NonFiniteError("non-finite loss or gradient at step " + std::to_string(step), out.trace);
    adam_step(params, lg.gradient, cfg.learning_rate_at(step), adam, hp);
  }
  if (!params.allFinite()) throw NonFiniteError("non-finite pose after refinement", out.trace);

  out.grasp = hand::HandPose::from_vector(params).canonical();
  out.final_loss = grasp_losses(request, hand::skin_vertices(*request.asset, out.grasp), cfg.steps);
  out.quality = evaluate_quality(*request.asset, *request.object, request.direction, out.grasp, cfg.contact_threshold);
  return out;
}

}  // namespace graspforge::grasp

#pragma once

#include "graspforge/grasp/io.hpp"
#include "graspforge/hand/mirror.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace graspforge::motion {

struct HandoverTiming {
  double approach = 1.0;   // s
  double close = 0.5;      // s
  double transport = 1.5;  // s
  double frame_rate = 30.0;

  static int frames_for(double duration, double rate) { return static_cast<int>(std::lround(duration * rate)); }

  void validate() const {
    for (double d : {approach, close, transport, frame_rate})
      if (!std::isfinite(d) || !(d > 0.0)) throw Error(ErrorCode::InvalidTiming, "phase durations and frame rate must be positive");
    for (double d : {approach, close, transport})
      if (frames_for(d, frame_rate) < 1)
        throw Error(ErrorCode::InvalidTiming, "phase of " + std::to_string(d) + " s has no frame at " +
                                                  std::to_string(frame_rate) + " Hz");
  }
};

inline void to_json(nlohmann::json& j, const HandoverTiming& t) {
  j = {{"approach", t.approach}, {"close", t.close}, {"transport", t.transport}, {"frame_rate", t.frame_rate}};
}

enum class Phase { Approach, Close, Transport };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Approach: return "approach";
    case Phase::Close: return "close";
    case Phase::Transport: return "transport";
  }
  return "unknown";
}

struct PhaseRange {
  int begin = 0;  // first frame index
  int end = 0;    // one past the last
  int size() const { return end - begin; }
};

/// Hand joints (16) plus fingertips (5) by default.
inline constexpr int kFeatureCount = hand::kJoints + hand::kFingertips;

struct Frame {
  double time = 0.0;  // s; frame k sits at the end of its interval, (k + 1) / rate
  Phase phase = Phase::Approach;
  hand::HandPose hand;
  Rigid object;
  std::vector<double> features;  // signed distances of joints then fingertips, object frame
};

struct SequenceProvenance {
  std::string request_hash;  // FNV-1a of the grasp request (direction, config, object provenance)
  Rigid initial;             // object pose at the start
  Rigid target;              // object pose at handover
  std::uint64_t seed = 0;
  grasp::GraspProvenance object;
};

struct HandoverSequence {
  std::vector<Frame> frames;
  double frame_rate = 30.0;
  PhaseRange approach, close, transport;
  hand::Chirality chirality = hand::Chirality::Right;
  SequenceProvenance provenance;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::hash_string(text)));
  return buf;
}

inline hand::HandPose with_global(const Rigid& T, const hand::Coefficients& theta) {
  return {T.t, so3::log(T.R), theta};
}

}  // namespace detail

inline std::string request_hash(const grasp::GraspKeyframes& k) {
  nlohmann::json j;
  j["direction"] = {k.direction.x(), k.direction.y(), k.direction.z()};
  j["config"] = k.config;
  j["object"] = k.provenance;
  j["chirality"] = hand::to_string(k.chirality);
  return detail::fnv1a_hex(j.dump());
}

/// Signed distance of every joint and fingertip, taken in the object's own frame.
inline std::vector<double> sdf_joint_features(const hand::HandAsset& asset, const hand::HandPose& pose, const Rigid& object_pose,
                                              const geometry::ProximityIndex& object) {
  const auto fk = hand::forward_kinematics(asset, pose);
  const Rigid to_object = object_pose.inverse();
  std::vector<double> f;
  f.reserve(kFeatureCount);
  for (int j = 0; j < hand::kJoints; ++j)
    f.push_back(geometry::signed_distance(to_object(fk.position[static_cast<std::size_t>(j)]), object));
  for (int t = 0; t < hand::kFingertips; ++t) {
    const auto v = static_cast<std::size_t>(asset.fingertips[static_cast<std::size_t>(t)]);
    Vec3 p = Vec3::Zero();
    for (int j = 0; j < hand::kJoints; ++j) {
      const double w = asset.skin_weights(static_cast<Eigen::Index>(v), j);
      if (w != 0.0) p += w * fk.apply(asset, j, asset.template_vertices[v]);
    }
    f.push_back(geometry::signed_distance(to_object(p), object));
  }
  return f;
}

/// Recomputes every frame's features; `object` is the mesh in its own frame.
inline void compute_features(HandoverSequence& seq, const hand::HandAsset& asset, const geometry::ProximityIndex& object) {
  for (auto& f : seq.frames) f.features = sdf_joint_features(asset, f.hand, f.object, object);
}

/// Kinematic approach -> close -> transport. Keyframe poses live in the object's
/// mesh frame; `initial` places that frame in the world.
class HandoverPlan {
 public:
  HandoverPlan(const grasp::GraspKeyframes& k, const Rigid& initial, const Rigid& target)
      : keyframes_(k), initial_(initial), target_(target) {
    pre_ = initial * keyframes_.pre.global();
    grasp_ = initial * keyframes_.grasp.global();
    grasp_world_ = detail::with_global(grasp_, keyframes_.grasp.coefficients);
  }

  // Wrist moves along the rigid geodesic with the fingers held open.
  hand::HandPose approach(double s) const {
    if (s == 0.0) return detail::with_global(pre_, keyframes_.pre.coefficients);
    return detail::with_global(interpolate_rigid(pre_, grasp_, s), keyframes_.pre.coefficients);
  }

  // Wrist fixed, coefficients blend linearly from open to grasp.
  hand::HandPose close(double s) const {
    hand::HandPose p = grasp_world_;
    p.coefficients = (1.0 - s) * keyframes_.pre.coefficients + s * keyframes_.grasp.coefficients;
    return p;
  }

  Rigid object_at(double s) const { return interpolate_rigid(initial_, target_, s); }

  // Hand carried rigidly with the object.
  hand::HandPose transport(double s) const {
    if (s == 0.0) return grasp_world_;
    const Rigid T = object_at(s) * initial_.inverse() * grasp_;
    return detail::with_global(T, keyframes_.grasp.coefficients);
  }

 private:
  grasp::GraspKeyframes keyframes_;
  Rigid initial_, target_;
  Rigid pre_, grasp_;
  hand::HandPose grasp_world_;
};

inline HandoverSequence synthesize_handover(const grasp::GraspKeyframes& k, const Rigid& initial, const Rigid& target,
                                            const HandoverTiming& timing, const hand::HandAsset& asset,
                                            const geometry::ProximityIndex& object, std::uint64_t seed = 0) {
  timing.validate();
  const HandoverPlan plan(k, initial, target);
  const int na = HandoverTiming::frames_for(timing.approach, timing.frame_rate);
  const int nc = HandoverTiming::frames_for(timing.close, timing.frame_rate);
  const int nt = HandoverTiming::frames_for(timing.transport, timing.frame_rate);

  HandoverSequence seq;
  seq.frame_rate = timing.frame_rate;
  seq.chirality = k.chirality;
  seq.approach = {0, na};
  seq.close = {na, na + nc};
  seq.transport = {na + nc, na + nc + nt};
  seq.provenance = {request_hash(k), initial, target, seed, k.provenance};
  seq.frames.resize(static_cast<std::size_t>(na + nc + nt));
  for (int i = 0; i < na + nc + nt; ++i) {
    Frame& f = seq.frames[static_cast<std::size_t>(i)];
    f.time = static_cast<double>(i + 1) / timing.frame_rate;
    if (i < na) {
      f.phase = Phase::Approach;
      f.hand = plan.approach(static_cast<double>(i + 1) / na);
      f.object = initial;
    } else if (i < na + nc) {
      f.phase = Phase::Close;
      f.hand = plan.close(static_cast<double>(i - na + 1) / nc);
      f.object = initial;
    } else {
      const double s = static_cast<double>(i - na - nc + 1) / nt;
      f.phase = Phase::Transport;
      f.hand = plan.transport(s);
      f.object = plan.object_at(s);
    }
    f.features = sdf_joint_features(asset, f.hand, f.object, object);
  }
  return seq;
}

/// Left-hand counterpart of right-hand keyframes (object mirrored with `mirror_mesh`).
inline grasp::GraspKeyframes mirror_keyframes(const grasp::GraspKeyframes& k) {
  grasp::GraspKeyframes out = k;
  out.pre = hand::mirror(k.pre);
  out.grasp = hand::mirror(k.grasp);
  out.direction = hand::mirror_point(k.direction);
  out.chirality = hand::flipped(k.chirality);
  out.pregrasp.translation = out.pre.translation;
  out.pregrasp.orientation = out.pre.orientation;
  out.pregrasp.center = hand::mirror_point(k.pregrasp.center);
  out.pregrasp.minor_axis = hand::mirror_point(k.pregrasp.minor_axis);
  out.pregrasp.axis_rotation = -k.pregrasp.axis_rotation;
  out.final_loss.wrist_vector = hand::mirror_point(k.final_loss.wrist_vector);
  return out;
}

/// Reflects every hand and object pose; features carry over because the
/// reflection is an isometry (the mirrored object is `mirror_mesh` of the original).
inline HandoverSequence mirror_sequence(const HandoverSequence& seq) {
  HandoverSequence out = seq;
  out.chirality = hand::flipped(seq.chirality);
  for (auto& f : out.frames) {
    f.hand = hand::mirror(f.hand);
    f.object = hand::mirror(f.object);
  }
  out.provenance.initial = hand::mirror(seq.provenance.initial);
  out.provenance.target = hand::mirror(seq.provenance.target);
  return out;
}

/// Mirrors and recomputes features against the mirrored hand and object.
inline HandoverSequence mirror_sequence(const HandoverSequence& seq, const hand::HandAsset& mirrored_asset,
                                        const geometry::ProximityIndex& mirrored_object) {
  HandoverSequence out = mirror_sequence(seq);
  compute_features(out, mirrored_asset, mirrored_object);
  return out;
}

}  // namespace graspforge::motion

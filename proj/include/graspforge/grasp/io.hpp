#pragma once

#include "graspforge/grasp/optimize.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

// "graspkeyframes-v1": poses are 21 plain JSON numbers (tau, phi, theta), which
// round-trip float64 exactly.

namespace graspforge::grasp {

inline constexpr const char* kKeyframesVersion = "graspkeyframes-v1";

inline nlohmann::json pose_to_json(const hand::HandPose& p) {
  const auto v = p.to_vector();
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline hand::HandPose pose_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != static_cast<std::size_t>(hand::kPoseParams))
    throw Error(ErrorCode::ParseError, "pose needs " + std::to_string(hand::kPoseParams) + " values, got " +
                                           std::to_string(values.size()));
  hand::PoseVector v;
  for (int i = 0; i < hand::kPoseParams; ++i) v[i] = values[static_cast<std::size_t>(i)];
  return hand::HandPose::from_vector(v);
}

inline void to_json(nlohmann::json& j, const QualityReport& q) {
  j = {{"max_penetration", q.max_penetration},
       {"contact_count", q.contact_count},
       {"direction_deviation", q.direction_deviation}};
}

inline void from_json(const nlohmann::json& j, QualityReport& q) {
  q.max_penetration = j.at("max_penetration").get<double>();
  q.contact_count = j.at("contact_count").get<std::size_t>();
  q.direction_deviation = j.at("direction_deviation").get<double>();
}

inline void to_json(nlohmann::json& j, const GlobalPregrasp& g) {
  j = {{"center", {g.center.x(), g.center.y(), g.center.z()}},
       {"furthest_distance", g.furthest_distance},
       {"clearance", g.clearance},
       {"clearance_escalations", g.clearance_escalations},
       {"axis_undefined", g.axis_undefined},
       {"axis_flipped", g.axis_flipped},
       {"axis_rotation", g.axis_rotation},
       {"minor_axis", {g.minor_axis.x(), g.minor_axis.y(), g.minor_axis.z()}}};
}

inline void from_json(const nlohmann::json& j, GlobalPregrasp& g) {
  auto vec = [&](const char* key) {
    const auto a = j.at(key).get<std::array<double, 3>>();
    return Vec3(a[0], a[1], a[2]);
  };
  g.center = vec("center");
  g.furthest_distance = j.at("furthest_distance").get<double>();
  g.clearance = j.at("clearance").get<double>();
  g.clearance_escalations = j.at("clearance_escalations").get<int>();
  g.axis_undefined = j.at("axis_undefined").get<bool>();
  g.axis_flipped = j.at("axis_flipped").get<bool>();
  g.axis_rotation = j.at("axis_rotation").get<double>();
  g.minor_axis = vec("minor_axis");
}

inline void to_json(nlohmann::json& j, const GraspProvenance& p) {
  j = {{"mesh", p.mesh}, {"scale", p.scale}, {"seed", p.seed}, {"sample_count", p.sample_count}, {"hand", p.hand}};
}

inline void from_json(const nlohmann::json& j, GraspProvenance& p) {
  p.mesh = j.at("mesh").get<std::string>();
  p.scale = j.at("scale").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.sample_count = j.at("sample_count").get<std::size_t>();
  p.hand = j.at("hand").get<std::string>();
}

inline nlohmann::json to_json(const GraspKeyframes& k) {
  nlohmann::json j;
  j["version"] = kKeyframesVersion;
  j["chirality"] = hand::to_string(k.chirality);
  j["direction"] = {k.direction.x(), k.direction.y(), k.direction.z()};
  j["pre"] = pose_to_json(k.pre);
  j["grasp"] = pose_to_json(k.grasp);
  j["final_loss"] = k.final_loss;
  j["quality"] = k.quality;
  j["pregrasp"] = k.pregrasp;
  j["config"] = k.config;
  j["provenance"] = k.provenance;
  j["trace"] = k.trace;
  return j;
}

inline GraspKeyframes keyframes_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<std::string>() != kKeyframesVersion)
      throw Error(ErrorCode::ParseError, "unsupported keyframes version " + j.at("version").dump());
    GraspKeyframes k;
    k.chirality = hand::chirality_from_string(j.at("chirality").get<std::string>());
    const auto d = j.at("direction").get<std::array<double, 3>>();
    k.direction = Vec3(d[0], d[1], d[2]);
    k.pre = pose_from_json(j.at("pre"));
    k.grasp = pose_from_json(j.at("grasp"));
    k.final_loss = j.at("final_loss").get<LossBreakdown>();
    k.quality = j.at("quality").get<QualityReport>();
    k.pregrasp = j.at("pregrasp").get<GlobalPregrasp>();
    k.config = j.at("config").get<OptimizerConfig>();
    k.provenance = j.at("provenance").get<GraspProvenance>();
    k.trace = j.at("trace").get<std::vector<double>>();
    k.pregrasp.translation = k.pre.translation;
    k.pregrasp.orientation = k.pre.orientation;
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("keyframes: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, std::string("keyframes: ") + e.what());
  }
}

inline void save_keyframes(const GraspKeyframes& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_json(k).dump(1) << '\n';
}

inline GraspKeyframes load_keyframes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return keyframes_from_json(j);
}

}  // namespace graspforge::grasp

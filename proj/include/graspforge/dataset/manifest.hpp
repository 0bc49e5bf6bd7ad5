#pragma once

#include "graspforge/grasp/config.hpp"
#include "graspforge/grasp/source.hpp"
#include "graspforge/motion/handover.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

namespace graspforge::dataset {

inline constexpr const char* kManifestVersion = "manifest-v1";

struct Interval {
  double min = 0.0;
  double max = 0.0;
  double mid() const { return 0.5 * (min + max); }
};

/// Target offsets from the initial object position (m).
struct WorkspaceRanges {
  Interval x{-0.15, 0.15};
  Interval y{-0.15, 0.15};
  Interval z{0.10, 0.35};
};

struct Thresholds {
  double max_penetration = 0.005;  // m
  std::size_t min_contacts = 3;
  double max_deviation_deg = 20.0;
};

struct ObjectEntry {
  std::string id;
  std::string source;  // mesh path (resolved against the manifest directory) or primitive
  double scale = 1.0;
};

struct DatasetManifest {
  std::vector<ObjectEntry> objects;
  int directions_per_object = 4;
  Vec3 robot_bearing = Vec3::UnitX();  // grasp directions point toward the robot
  double cone_half_angle_deg = 60.0;
  WorkspaceRanges workspace;
  double target_yaw_deg = 0.0;  // uniform yaw perturbation of the target; 0 keeps the initial orientation
  double max_width = 0.15;      // m
  Thresholds thresholds;
  std::uint64_t seed = 0;
  std::string hand = "test";
  bool mirror = true;
  motion::HandoverTiming timing;
  grasp::OptimizerConfig optimizer;
  std::string output = "bundle";

  /// Throws ManifestError describing the first violated invariant.
  void validate() const;
};

inline void to_json(nlohmann::json& j, const Interval& i) { j = {i.min, i.max}; }

inline void to_json(nlohmann::json& j, const Thresholds& t) {
  j = {{"max_penetration", t.max_penetration}, {"min_contacts", t.min_contacts}, {"max_deviation_deg", t.max_deviation_deg}};
}

/// Fully resolved manifest, echoed into every bundle.
inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : m.objects) objects.push_back({{"id", o.id}, {"mesh", o.source}, {"scale", o.scale}});
  return {{"version", kManifestVersion},
          {"objects", objects},
          {"directions_per_object", m.directions_per_object},
          {"robot_bearing", {m.robot_bearing.x(), m.robot_bearing.y(), m.robot_bearing.z()}},
          {"cone_half_angle_deg", m.cone_half_angle_deg},
          {"workspace", {{"x", m.workspace.x}, {"y", m.workspace.y}, {"z", m.workspace.z}}},
          {"target_yaw_deg", m.target_yaw_deg},
          {"max_width", m.max_width},
          {"thresholds", m.thresholds},
          {"seed", m.seed},
          {"hand", m.hand},
          {"mirror", m.mirror},
          {"timing", m.timing},
          {"optimizer", m.optimizer},
          {"output", m.output}};
}

inline void DatasetManifest::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ManifestError, "manifest: " + what); };
  if (directions_per_object < 0) fail("directions_per_object must be >= 0");
  if (std::abs(robot_bearing.norm() - 1.0) > 1e-9) fail("robot_bearing must be a unit vector");
  if (!(cone_half_angle_deg > 0.0 && cone_half_angle_deg <= 90.0)) fail("cone_half_angle_deg must lie in (0, 90]");
  for (const auto* r : {&workspace.x, &workspace.y, &workspace.z})
    if (!std::isfinite(r->min) || !std::isfinite(r->max) || r->min > r->max) fail("workspace ranges must satisfy min <= max");
  if (!(target_yaw_deg >= 0.0 && target_yaw_deg <= 180.0)) fail("target_yaw_deg must lie in [0, 180]");
  if (!(max_width > 0.0) || !std::isfinite(max_width)) fail("max_width must be positive");
  if (!(thresholds.max_penetration >= 0.0) || !(thresholds.max_deviation_deg >= 0.0)) fail("thresholds must be >= 0");
  std::set<std::string> ids;
  for (const auto& o : objects) {
    if (o.id.empty() || o.id == "." || o.id == "..") fail("object ids must be non-empty");
    for (unsigned char c : o.id)
      if (!std::isalnum(c) && c != '_' && c != '-' && c != '.') fail("object id '" + o.id + "' must be [A-Za-z0-9_.-]");
    if (!ids.insert(o.id).second) fail("duplicate object id '" + o.id + "'");
    if (o.source.empty()) fail("object '" + o.id + "' has no mesh");
    if (!(o.scale > 0.0) || !std::isfinite(o.scale)) fail("object '" + o.id + "' scale must be positive");
  }
  try {
    timing.validate();
    optimizer.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

namespace detail {

inline Interval interval_from(const nlohmann::json& j) {
  const auto a = j.get<std::array<double, 2>>();
  return {a[0], a[1]};
}

}  // namespace detail

/// Parses a manifest; relative mesh paths resolve against `base_dir`.
inline DatasetManifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  DatasetManifest m;
  try {
    if (j.value("version", "") != kManifestVersion)
      throw Error(ErrorCode::ManifestError, std::string("manifest: version must be \"") + kManifestVersion + "\"");
    for (const auto& o : j.at("objects")) {
      ObjectEntry e;
      e.id = o.at("id").get<std::string>();
      e.source = o.at("mesh").get<std::string>();
      e.scale = o.value("scale", 1.0);
      if (!grasp::is_primitive_source(e.source) && std::filesystem::path(e.source).is_relative() && !base_dir.empty())
        e.source = (base_dir / e.source).lexically_normal().string();
      m.objects.push_back(std::move(e));
    }
    m.directions_per_object = j.value("directions_per_object", m.directions_per_object);
    if (j.contains("robot_bearing")) {
      const auto b = j.at("robot_bearing").get<std::array<double, 3>>();
      const Vec3 v(b[0], b[1], b[2]);
      if (!(v.norm() > 0.0) || !v.allFinite()) throw Error(ErrorCode::ManifestError, "manifest: robot_bearing must be non-zero");
      m.robot_bearing = v.normalized();
    }
    m.cone_half_angle_deg = j.value("cone_half_angle_deg", m.cone_half_angle_deg);
    if (j.contains("workspace")) {
      const auto& w = j.at("workspace");
      if (w.contains("x")) m.workspace.x = detail::interval_from(w.at("x"));
      if (w.contains("y")) m.workspace.y = detail::interval_from(w.at("y"));
      if (w.contains("z")) m.workspace.z = detail::interval_from(w.at("z"));
    }
    m.target_yaw_deg = j.value("target_yaw_deg", m.target_yaw_deg);
    m.max_width = j.value("max_width", m.max_width);
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      m.thresholds.max_penetration = t.value("max_penetration", m.thresholds.max_penetration);
      m.thresholds.min_contacts = t.value("min_contacts", m.thresholds.min_contacts);
      m.thresholds.max_deviation_deg = t.value("max_deviation_deg", m.thresholds.max_deviation_deg);
    }
    m.seed = j.value("seed", m.seed);
    m.hand = j.value("hand", m.hand);
    if (m.hand != "test" && std::filesystem::path(m.hand).is_relative() && !base_dir.empty())
      m.hand = (base_dir / m.hand).lexically_normal().string();
    m.mirror = j.value("mirror", m.mirror);
    if (j.contains("timing")) {
      const auto& t = j.at("timing");
      m.timing.approach = t.value("approach", m.timing.approach);
      m.timing.close = t.value("close", m.timing.close);
      m.timing.transport = t.value("transport", m.timing.transport);
      m.timing.frame_rate = t.value("frame_rate", m.timing.frame_rate);
    }
    if (j.contains("optimizer")) grasp::apply_overrides(m.optimizer, j.at("optimizer"));
    m.output = j.value("output", m.output);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ManifestError) throw;
    throw Error(ErrorCode::ManifestError, std::string("manifest: ") + e.what());
  }
  m.validate();
  return m;
}

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ManifestError, "cannot open manifest '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ManifestError, path + ": " + e.what());
  }
  return manifest_from_json(j, std::filesystem::path(path).parent_path());
}

}  // namespace graspforge::dataset

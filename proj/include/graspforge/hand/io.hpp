#pragma once

#include "graspforge/hand/asset.hpp"
#include "graspforge/io/base64.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

// "handasset-v1" container: one JSON document; float arrays are base64 of
// little-endian float64 in row-major order, integer arrays are plain JSON.

namespace graspforge::hand {

inline constexpr const char* kHandAssetVersion = "handasset-v1";

inline nlohmann::json to_json(const HandAsset& a) {
  using nlohmann::json;
  const auto V = a.template_vertices.size();
  std::vector<double> tmpl;
  tmpl.reserve(V * 3);
  for (const auto& v : a.template_vertices) tmpl.insert(tmpl.end(), {v.x(), v.y(), v.z()});
  std::vector<double> weights(V * kJoints);
  for (std::size_t v = 0; v < V; ++v)
    for (int j = 0; j < kJoints; ++j) weights[v * kJoints + static_cast<std::size_t>(j)] = a.skin_weights(static_cast<Eigen::Index>(v), j);
  std::vector<double> basis(kJointAngles * kPcaComponents);
  for (int r = 0; r < kJointAngles; ++r)
    for (int c = 0; c < kPcaComponents; ++c) basis[static_cast<std::size_t>(r * kPcaComponents + c)] = a.pca_basis(r, c);
  std::vector<double> joints;
  for (const auto& j : a.rest_joints) joints.insert(joints.end(), {j.x(), j.y(), j.z()});
  std::vector<int> faces;
  for (const auto& f : a.faces) faces.insert(faces.end(), f.begin(), f.end());
  std::vector<int> contact, palmar;
  for (std::size_t v = 0; v < V; ++v) {
    if (a.contact_mask[v]) contact.push_back(static_cast<int>(v));
    if (a.palmar_mask[v]) palmar.push_back(static_cast<int>(v));
  }

  json j;
  j["version"] = kHandAssetVersion;
  j["chirality"] = to_string(a.chirality);
  j["num_vertices"] = V;
  j["num_joints"] = kJoints;
  j["num_components"] = kPcaComponents;
  j["template"] = io::encode_f64(tmpl.data(), tmpl.size());
  j["skin_weights"] = io::encode_f64(weights.data(), weights.size());
  j["pca_basis"] = io::encode_f64(basis.data(), basis.size());
  j["pca_mean"] = io::encode_f64(a.pca_mean.data(), kJointAngles);
  j["flat_coefficients"] = io::encode_f64(a.flat_coefficients.data(), kPcaComponents);
  j["rest_joints"] = io::encode_f64(joints.data(), joints.size());
  j["faces"] = faces;
  j["parents"] = a.parents;
  j["fingertips"] = a.fingertips;
  j["contact_vertices"] = contact;
  j["palmar_vertices"] = palmar;
  return j;
}

inline HandAsset hand_asset_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> void { throw Error(ErrorCode::ParseError, "hand asset: " + what); };
  try {
    if (j.at("version").get<std::string>() != kHandAssetVersion) fail("unsupported version");
    if (j.at("num_joints").get<int>() != kJoints || j.at("num_components").get<int>() != kPcaComponents)
      fail("expected 16 joints and 15 pose components");
    const auto V = j.at("num_vertices").get<std::size_t>();
    auto floats = [&](const char* key, std::size_t expected) {
      auto values = io::decode_f64(j.at(key).get<std::string>());
      if (values.size() != expected) fail(std::string("wrong length for ") + key);
      return values;
    };
    HandAsset a;
    a.chirality = chirality_from_string(j.at("chirality").get<std::string>());
    const auto tmpl = floats("template", V * 3);
    for (std::size_t v = 0; v < V; ++v) a.template_vertices.emplace_back(tmpl[3 * v], tmpl[3 * v + 1], tmpl[3 * v + 2]);
    const auto weights = floats("skin_weights", V * kJoints);
    a.skin_weights.resize(static_cast<Eigen::Index>(V), kJoints);
    for (std::size_t v = 0; v < V; ++v)
      for (int k = 0; k < kJoints; ++k) a.skin_weights(static_cast<Eigen::Index>(v), k) = weights[v * kJoints + static_cast<std::size_t>(k)];
    const auto basis = floats("pca_basis", kJointAngles * kPcaComponents);
    for (int r = 0; r < kJointAngles; ++r)
      for (int c = 0; c < kPcaComponents; ++c) a.pca_basis(r, c) = basis[static_cast<std::size_t>(r * kPcaComponents + c)];
    const auto mean = floats("pca_mean", kJointAngles);
    for (int r = 0; r < kJointAngles; ++r) a.pca_mean[r] = mean[static_cast<std::size_t>(r)];
    const auto flat = floats("flat_coefficients", kPcaComponents);
    for (int c = 0; c < kPcaComponents; ++c) a.flat_coefficients[c] = flat[static_cast<std::size_t>(c)];
    const auto joints = floats("rest_joints", kJoints * 3);
    for (std::size_t k = 0; k < kJoints; ++k) a.rest_joints[k] = Vec3(joints[3 * k], joints[3 * k + 1], joints[3 * k + 2]);

    const auto faces = j.at("faces").get<std::vector<int>>();
    if (faces.size() % 3 != 0) fail("faces length is not a multiple of 3");
    for (std::size_t f = 0; f < faces.size(); f += 3) a.faces.push_back({faces[f], faces[f + 1], faces[f + 2]});
    a.parents = j.at("parents").get<std::array<int, kJoints>>();
    a.fingertips = j.at("fingertips").get<std::array<int, kFingertips>>();
    a.contact_mask.assign(V, 0);
    a.palmar_mask.assign(V, 0);
    for (int v : j.at("contact_vertices").get<std::vector<int>>()) {
      if (v < 0 || static_cast<std::size_t>(v) >= V) fail("contact vertex out of range");
      a.contact_mask[static_cast<std::size_t>(v)] = 1;
    }
    for (int v : j.value("palmar_vertices", std::vector<int>{})) {
      if (v < 0 || static_cast<std::size_t>(v) >= V) fail("palmar vertex out of range");
      a.palmar_mask[static_cast<std::size_t>(v)] = 1;
    }
    validate(a);
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("hand asset: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ParseError, e.what());
    throw;
  }
}

inline void save_hand_asset(const HandAsset& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << to_json(a).dump(1) << '\n';
}

inline HandAsset load_hand_asset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open hand asset '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return hand_asset_from_json(j);
}

}  // namespace graspforge::hand

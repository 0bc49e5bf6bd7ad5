#pragma once

#include "graspforge/dataset/manifest.hpp"

namespace graspforge::dataset {

enum class Reason { PenetrationExceeded, TooFewContacts, DirectionDeviation, StandoffFailure, NonFinite, WidthExceeded };

inline constexpr std::array<Reason, 6> kAllReasons = {Reason::PenetrationExceeded, Reason::TooFewContacts,
                                                      Reason::DirectionDeviation,  Reason::StandoffFailure,
                                                      Reason::NonFinite,           Reason::WidthExceeded};

inline const char* to_string(Reason r) {
  switch (r) {
    case Reason::PenetrationExceeded: return "PenetrationExceeded";
    case Reason::TooFewContacts: return "TooFewContacts";
    case Reason::DirectionDeviation: return "DirectionDeviation";
    case Reason::StandoffFailure: return "StandoffFailure";
    case Reason::NonFinite: return "NonFinite";
    case Reason::WidthExceeded: return "WidthExceeded";
  }
  return "Unknown";
}

inline Reason reason_from_string(const std::string& s) {
  for (Reason r : kAllReasons)
    if (s == to_string(r)) return r;
  throw Error(ErrorCode::ParseError, "unknown reason code '" + s + "'");
}

struct Verdict {
  bool accepted = false;
  std::vector<Reason> reasons;  // empty iff accepted; ordered as in kAllReasons
  grasp::QualityReport metrics;

  static Verdict rejected(Reason r, const grasp::QualityReport& m = {}) { return {false, {r}, m}; }
};

inline void to_json(nlohmann::json& j, const Verdict& v) {
  nlohmann::json reasons = nlohmann::json::array();
  for (Reason r : v.reasons) reasons.push_back(to_string(r));
  j = {{"accepted", v.accepted}, {"reasons", reasons}, {"metrics", v.metrics}};
}

inline void from_json(const nlohmann::json& j, Verdict& v) {
  v.accepted = j.at("accepted").get<bool>();
  v.reasons.clear();
  for (const auto& r : j.at("reasons")) v.reasons.push_back(reason_from_string(r.get<std::string>()));
  v.metrics = j.at("metrics").get<grasp::QualityReport>();
}

namespace detail {

inline bool finite_keyframes(const grasp::GraspKeyframes& k) {
  for (double t : k.trace)
    if (!std::isfinite(t)) return false;
  return k.pre.to_vector().allFinite() && k.grasp.to_vector().allFinite() && std::isfinite(k.quality.max_penetration) &&
         std::isfinite(k.quality.direction_deviation) && std::isfinite(k.final_loss.total);
}

inline bool finite_sequence(const motion::HandoverSequence& seq) {
  for (const auto& f : seq.frames) {
    if (!std::isfinite(f.time) || !f.hand.to_vector().allFinite() || !f.object.R.allFinite() || !f.object.t.allFinite())
      return false;
    for (double x : f.features)
      if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace detail

/// Geometric surrogate for grasp success; every bound is inclusive.
inline Verdict accept_sequence(const grasp::GraspKeyframes& k, const motion::HandoverSequence* seq, const Thresholds& t) {
  Verdict v;
  v.metrics = k.quality;
  if (!detail::finite_keyframes(k) || (seq && !detail::finite_sequence(*seq))) {
    v.reasons = {Reason::NonFinite};
    return v;
  }
  if (k.quality.max_penetration > t.max_penetration) v.reasons.push_back(Reason::PenetrationExceeded);
  if (k.quality.contact_count < t.min_contacts) v.reasons.push_back(Reason::TooFewContacts);
  if (k.quality.direction_deviation > t.max_deviation_deg) v.reasons.push_back(Reason::DirectionDeviation);
  v.accepted = v.reasons.empty();
  return v;
}

}  // namespace graspforge::dataset

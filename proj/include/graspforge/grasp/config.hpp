#pragma once

#include "graspforge/core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace graspforge::grasp {

struct OptimizerConfig {
  // Loss weights: penetration, contact, dynamic fingertip, control.
  double alpha = 1.5;
  double beta = 3.0;
  double gamma = 0.1;
  double delta = 1.0;

  double k_magnitude = 1.0;  // |k|; k = -|k| before k_flip_step, +|k| from then on
  int k_flip_step = 100;

  int steps = 500;
  double learning_rate = 0.003;
  double decay_factor = 0.9;
  int decay_interval = 100;

  int pregrasp_iterations = 300;
  double pregrasp_learning_rate = 0.003;

  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  double clearance = 0.08;  // metres beyond the furthest sample
  int max_clearance_doublings = 3;
  double contact_threshold = 0.003;
  int sample_count = 3000;
  bool contact_all_vertices = false;  // contact loss over every hand vertex instead of the mask

  double learning_rate_at(int step) const {
    return learning_rate * std::pow(decay_factor, step / decay_interval);
  }
  double dynamic_coefficient(int step) const { return step < k_flip_step ? -k_magnitude : k_magnitude; }

  void validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "optimizer config: " + what); };
    for (double w : {alpha, beta, gamma, delta, k_magnitude})
      if (!(w >= 0.0) || !std::isfinite(w)) fail("weights must be finite and non-negative");
    if (steps <= 0) fail("steps must be positive");
    if (pregrasp_iterations < 0) fail("pre-grasp iterations must be non-negative");
    if (!(learning_rate > 0.0) || !(pregrasp_learning_rate > 0.0)) fail("learning rates must be positive");
    if (!(decay_factor > 0.0 && decay_factor <= 1.0)) fail("decay factor must lie in (0, 1]");
    if (decay_interval <= 0) fail("decay interval must be positive");
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_epsilon > 0.0))
      fail("invalid Adam moments");
    if (!(clearance > 0.0) || max_clearance_doublings < 0) fail("invalid clearance");
    if (!(contact_threshold > 0.0)) fail("contact threshold must be positive");
    if (sample_count <= 0) fail("sample count must be positive");
  }
};

inline void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = {{"alpha", c.alpha},
       {"beta", c.beta},
       {"gamma", c.gamma},
       {"delta", c.delta},
       {"k_magnitude", c.k_magnitude},
       {"k_flip_step", c.k_flip_step},
       {"steps", c.steps},
       {"learning_rate", c.learning_rate},
       {"decay_factor", c.decay_factor},
       {"decay_interval", c.decay_interval},
       {"pregrasp_iterations", c.pregrasp_iterations},
       {"pregrasp_learning_rate", c.pregrasp_learning_rate},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_epsilon", c.adam_epsilon},
       {"clearance", c.clearance},
       {"max_clearance_doublings", c.max_clearance_doublings},
       {"contact_threshold", c.contact_threshold},
       {"sample_count", c.sample_count},
       {"contact_all_vertices", c.contact_all_vertices}};
}

/// Overrides only the keys present in `j`; unknown keys are an error.
inline void apply_overrides(OptimizerConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "optimizer config must be a JSON object");
  nlohmann::json known;
  to_json(known, c);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw Error(ErrorCode::ParseError, "unknown optimizer setting '" + key + "'");
  try {
    auto set = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    set("alpha", c.alpha);
    set("beta", c.beta);
    set("gamma", c.gamma);
    set("delta", c.delta);
    set("k_magnitude", c.k_magnitude);
    set("k_flip_step", c.k_flip_step);
    set("steps", c.steps);
    set("learning_rate", c.learning_rate);
    set("decay_factor", c.decay_factor);
    set("decay_interval", c.decay_interval);
    set("pregrasp_iterations", c.pregrasp_iterations);
    set("pregrasp_learning_rate", c.pregrasp_learning_rate);
    set("adam_beta1", c.adam_beta1);
    set("adam_beta2", c.adam_beta2);
    set("adam_epsilon", c.adam_epsilon);
    set("clearance", c.clearance);
    set("max_clearance_doublings", c.max_clearance_doublings);
    set("contact_threshold", c.contact_threshold);
    set("sample_count", c.sample_count);
    set("contact_all_vertices", c.contact_all_vertices);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("optimizer config: ") + e.what());
  }
}

inline void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c = OptimizerConfig{};
  apply_overrides(c, j);
}

}  // namespace graspforge::grasp

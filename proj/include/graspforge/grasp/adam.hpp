#pragma once

#include "graspforge/core.hpp"

#include <Eigen/Core>

#include <cmath>

namespace graspforge::grasp {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates; zero-initialised on first use.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int t = 0;
};

/// One bias-corrected Adam update of `params` in place.
template <typename Derived>
void adam_step(Eigen::MatrixBase<Derived>& params, const Eigen::Ref<const Eigen::VectorXd>& grad, double lr,
               AdamState& state, const AdamParams& hp = {}) {
  const auto n = grad.size();
  if (state.t == 0) {
    state.m = Eigen::VectorXd::Zero(n);
    state.v = Eigen::VectorXd::Zero(n);
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(hp.beta1, state.t);
  const double c2 = 1.0 - std::pow(hp.beta2, state.t);
  for (Eigen::Index i = 0; i < n; ++i) {
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * grad[i];
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + hp.epsilon);
  }
}

}  // namespace graspforge::grasp

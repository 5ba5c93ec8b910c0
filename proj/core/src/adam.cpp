// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

namespace {

bool grads_finite(const ParamGrads& g, std::size_t i) {
  return g.position[i].allFinite() && g.log_scale[i].allFinite() && g.rotation[i].allFinite() &&
         std::isfinite(g.opacity_logit[i]) && g.sh[i].allFinite();
}

inline double adam_update(double grad, double& m, double& v, double lr, const AdamConfig& c,
                          double bias1, double bias2) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad * grad;
  const double m_hat = m / bias1;
  const double v_hat = v / bias2;
  return lr * m_hat / (std::sqrt(v_hat) + c.eps);
}

}  // namespace

void AdamState::remap(const std::vector<std::int64_t>& source_index) {
  AdamState next;
  next.resize_zero(source_index.size());
  for (std::size_t i = 0; i < source_index.size(); ++i) {
    const std::int64_t src = source_index[i];
    if (src < 0) continue;
    const auto s = static_cast<std::size_t>(src);
    next.m.position[i] = m.position[s];
    next.m.log_scale[i] = m.log_scale[s];
    next.m.rotation[i] = m.rotation[s];
    next.m.opacity_logit[i] = m.opacity_logit[s];
    next.m.sh[i] = m.sh[s];
    next.v.position[i] = v.position[s];
    next.v.log_scale[i] = v.log_scale[s];
    next.v.rotation[i] = v.rotation[s];
    next.v.opacity_logit[i] = v.opacity_logit[s];
    next.v.sh[i] = v.sh[s];
  }
  *this = std::move(next);
}

double position_lr_at(const LearningRates& rates, int iter, int total_iters) {
  if (total_iters <= 1) return rates.position_init;
  const double t = std::clamp(static_cast<double>(iter) / total_iters, 0.0, 1.0);
  return rates.position_init * std::pow(rates.position_final / rates.position_init, t);
}

int adam_step(GaussianCloud& cloud, const ParamGrads& grads, AdamState& state,
              const LearningRates& rates, const AdamConfig& config, int iter, int total_iters) {
  const std::size_t n = cloud.size();
  if (grads.size() != n || state.size() != n) {
    throw std::invalid_argument("adam_step: gradient/state size mismatch");
  }
  const double bias1 = 1.0 - std::pow(config.beta1, iter);
  const double bias2 = 1.0 - std::pow(config.beta2, iter);
  const double lr_pos = position_lr_at(rates, iter, total_iters);
  const double lr_sh_rest = rates.sh / rates.sh_rest_divisor;

  int skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!grads_finite(grads, i)) {
      ++skipped;
      continue;
    }
    Gaussian3D& g = cloud.gaussians[i];
    for (int k = 0; k < 3; ++k) {
      g.position[k] -= adam_update(grads.position[i][k], state.m.position[i][k],
                                   state.v.position[i][k], lr_pos, config, bias1, bias2);
      g.log_scale[k] -= adam_update(grads.log_scale[i][k], state.m.log_scale[i][k],
                                    state.v.log_scale[i][k], rates.scale, config, bias1, bias2);
    }
    for (int k = 0; k < 4; ++k) {
      g.rotation[k] -= adam_update(grads.rotation[i][k], state.m.rotation[i][k],
                                   state.v.rotation[i][k], rates.rotation, config, bias1, bias2);
    }
    g.opacity_logit -= adam_update(grads.opacity_logit[i], state.m.opacity_logit[i],
                                   state.v.opacity_logit[i], rates.opacity, config, bias1, bias2);
    for (int row = 0; row < kShCoeffCount; ++row) {
      const double lr = row == 0 ? rates.sh : lr_sh_rest;
      for (int c = 0; c < 3; ++c) {
        g.sh(row, c) -= adam_update(grads.sh[i](row, c), state.m.sh[i](row, c),
                                    state.v.sh[i](row, c), lr, config, bias1, bias2);
      }
    }
    g.rotation.normalize();
  }
  return skipped;
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"
#include "attnsplat/render.hpp"

namespace attnsplat {

/// Per-parameter-group learning rates. The position rate decays
/// exponentially from `position_init` to `position_final` over training;
/// SH bands above DC run at sh / sh_rest_divisor.
struct LearningRates {
  double position_init = 1.6e-4;
  double position_final = 1.6e-6;
  double sh = 2.5e-3;
  double sh_rest_divisor = 20.0;
  double opacity = 0.05;
  double scale = 5e-3;
  double rotation = 1e-3;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates, one slot per Gaussian parameter.
struct AdamState {
  ParamGrads m;
  ParamGrads v;

  void resize_zero(std::size_t n) {
    m.resize_zero(n);
    v.resize_zero(n);
  }
  std::size_t size() const { return m.size(); }

  /// Re-aligns moments after densify/prune: entry i of the new state is
  /// copied from old index source_index[i], or zeroed when it is -1.
  void remap(const std::vector<std::int64_t>& source_index);
};

double position_lr_at(const LearningRates& rates, int iter, int total_iters);

/// One bias-corrected Adam step over every parameter group. Gaussians
/// with any non-finite gradient are skipped; the count is returned.
/// Quaternions are renormalized after the update.
int adam_step(GaussianCloud& cloud, const ParamGrads& grads, AdamState& state,
              const LearningRates& rates, const AdamConfig& config, int iter, int total_iters);

}  // namespace attnsplat

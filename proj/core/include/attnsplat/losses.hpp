// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/edge.hpp"
#include "attnsplat/image.hpp"

namespace attnsplat {

/// Sigmoid hand-over between the geometric and appearance terms.
struct ScheduleParams {
  double steepness = 10.0;   // s
  int total_iters = 7000;    // N
  double decay_node = 0.25;  // m, fraction of training where f crosses 0.5
};

/// f(i) = 1 / (1 + exp(2 s (i/N - m))); strictly decreasing, f(mN) = 0.5.
double schedule_weight(int iter, const ScheduleParams& params);

struct LossValueGrad {
  double value = 0.0;
  ImageBuffer grad; // dL/drender
};

/// Mean absolute error over all pixels and channels.
LossValueGrad l1_loss(const ImageBuffer& gt, const ImageBuffer& render);

/// Edge-attention weighted L1; the single-channel weight broadcasts over
/// channels and is treated as a constant (no gradient into the weights).
LossValueGrad geometric_loss(const ImageBuffer& gt, const ImageBuffer& render,
                             const WeightMap& weights);

/// Channel-separated attention-weighted L1 with constant weights.
LossValueGrad appearance_loss(const ImageBuffer& gt, const ImageBuffer& render,
                              const ImageBuffer& weights);

struct LossComponents {
  double total = 0.0;
  double l1 = 0.0;
  double geometric = 0.0;
  double appearance = 0.0;
  double schedule = 0.0; // f(i)
};

/// L = L1 + f(i) * L_geo + (1 - f(i)) * L_app, with weights recomputed
/// from the current render. Returns the combined gradient and components.
LossValueGrad total_loss(const ImageBuffer& gt, const ImageBuffer& render, int iter,
                         const ScheduleParams& schedule, const EdgeOptions& edge_opts,
                         LossComponents& components);

}  // namespace attnsplat

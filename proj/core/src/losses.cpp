// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

double schedule_weight(int iter, const ScheduleParams& params) {
  if (!(params.steepness > 0.0)) throw std::invalid_argument("schedule: steepness must be > 0");
  if (params.total_iters < 1) throw std::invalid_argument("schedule: total iterations must be >= 1");
  if (!(params.decay_node > 0.0 && params.decay_node < 1.0)) {
    throw std::invalid_argument("schedule: decay node must lie in (0,1)");
  }
  const double progress = static_cast<double>(iter) / params.total_iters;
  return 1.0 / (1.0 + std::exp(2.0 * params.steepness * (progress - params.decay_node)));
}

LossValueGrad l1_loss(const ImageBuffer& gt, const ImageBuffer& render) {
  require_same_shape(gt, render, "l1_loss");
  LossValueGrad out;
  out.grad = ImageBuffer(render.width, render.height);
  const double inv_count = 1.0 / static_cast<double>(render.count());
  for (std::size_t i = 0; i < render.data.size(); ++i) {
    const double diff = render.data[i] - gt.data[i];
    out.value += std::abs(diff) * inv_count;
    out.grad.data[i] = sign(diff) * inv_count;
  }
  return out;
}

LossValueGrad geometric_loss(const ImageBuffer& gt, const ImageBuffer& render,
                             const WeightMap& weights) {
  require_same_shape(gt, render, "geometric_loss");
  if (weights.width != render.width || weights.height != render.height) {
    throw std::invalid_argument("geometric_loss: weight map shape mismatch");
  }
  LossValueGrad out;
  out.grad = ImageBuffer(render.width, render.height);
  const double inv_count = 1.0 / static_cast<double>(render.count());
  for (int y = 0; y < render.height; ++y) {
    for (int x = 0; x < render.width; ++x) {
      const double w = weights.at(x, y);
      for (int c = 0; c < 3; ++c) {
        const double diff = render.at(x, y, c) - gt.at(x, y, c);
        out.value += w * std::abs(diff) * inv_count;
        out.grad.at(x, y, c) = w * sign(diff) * inv_count;
      }
    }
  }
  return out;
}

LossValueGrad appearance_loss(const ImageBuffer& gt, const ImageBuffer& render,
                              const ImageBuffer& weights) {
  require_same_shape(gt, render, "appearance_loss");
  require_same_shape(weights, render, "appearance_loss weights");
  LossValueGrad out;
  out.grad = ImageBuffer(render.width, render.height);
  const double inv_count = 1.0 / static_cast<double>(render.count());
  for (std::size_t i = 0; i < render.data.size(); ++i) {
    const double diff = render.data[i] - gt.data[i];
    out.value += weights.data[i] * std::abs(diff) * inv_count;
    out.grad.data[i] = weights.data[i] * sign(diff) * inv_count;
  }
  return out;
}

LossValueGrad total_loss(const ImageBuffer& gt, const ImageBuffer& render, int iter,
                         const ScheduleParams& schedule, const EdgeOptions& edge_opts,
                         LossComponents& components) {
  const double f = schedule_weight(iter, schedule);

  const LossValueGrad l1 = l1_loss(gt, render);
  const WeightMap w_geo = geometric_weights(gt, render, edge_opts);
  const LossValueGrad geo = geometric_loss(gt, render, w_geo);
  const ImageBuffer w_app = appearance_weights(gt, render);
  const LossValueGrad app = appearance_loss(gt, render, w_app);

  components.l1 = l1.value;
  components.geometric = geo.value;
  components.appearance = app.value;
  components.schedule = f;
  components.total = l1.value + f * geo.value + (1.0 - f) * app.value;

  LossValueGrad out;
  out.value = components.total;
  out.grad = ImageBuffer(render.width, render.height);
  for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
    out.grad.data[i] = l1.grad.data[i] + f * geo.grad.data[i] + (1.0 - f) * app.grad.data[i];
  }
  return out;
}

}  // namespace attnsplat

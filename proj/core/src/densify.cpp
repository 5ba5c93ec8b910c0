// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/densify.hpp"

#include "attnsplat/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

namespace {

constexpr double kSplitScaleShrink = 1.6; // children scales divide by this
constexpr double kOpacityResetCeiling = 0.01;

Vec3 normal3(Rng& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

}  // namespace

void DensifyStats::reset(std::size_t n) {
  grad_norm_sum.assign(n, 0.0);
  weighted_grad_sum.assign(n, 0.0);
  transmittance_sum.assign(n, 0.0);
  view_count.assign(n, 0);
}

void record_view(DensifyStats& stats, std::size_t gaussian_index, const Vec2& ndc_grad,
                 double t_view) {
  if (gaussian_index >= stats.size()) {
    throw std::out_of_range("record_view: gaussian index out of range");
  }
  if (t_view < 0.0) {
    throw std::invalid_argument("record_view: negative transmittance weight");
  }
  const double norm = ndc_grad.norm();
  stats.grad_norm_sum[gaussian_index] += norm;
  stats.weighted_grad_sum[gaussian_index] += t_view * norm;
  stats.transmittance_sum[gaussian_index] += t_view;
  stats.view_count[gaussian_index] += 1;
}

double densify_criterion(const DensifyStats& stats, std::size_t index, DensifyMode mode) {
  if (stats.view_count[index] == 0) return 0.0;
  if (mode == DensifyMode::kBaseline) {
    return stats.grad_norm_sum[index] / static_cast<double>(stats.view_count[index]);
  }
  if (stats.transmittance_sum[index] <= 0.0) return 0.0;
  return stats.weighted_grad_sum[index] / stats.transmittance_sum[index];
}

std::vector<DensifyAction> densify_decision(const DensifyStats& stats,
                                            const GaussianCloud& cloud,
                                            const DensifyConfig& config) {
  if (stats.size() != cloud.size()) {
    throw std::invalid_argument("densify_decision: stats do not match the cloud");
  }
  std::vector<DensifyAction> actions(cloud.size(), DensifyAction::kKeep);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double value = densify_criterion(stats, i, config.mode);
    if (value <= config.tau_pos) continue;
    const double max_scale = cloud.gaussians[i].log_scale.array().exp().maxCoeff();
    actions[i] = max_scale > config.scale_split_threshold ? DensifyAction::kSplit
                                                          : DensifyAction::kClone;
  }
  return actions;
}

DensifyResult apply_densify(const GaussianCloud& cloud, const std::vector<DensifyAction>& decisions,
                            const std::vector<Vec3>& position_grads, double position_lr,
                            std::uint64_t seed) {
  if (decisions.size() != cloud.size()) {
    throw std::invalid_argument("apply_densify: decisions do not match the cloud");
  }
  DensifyResult out;
  out.cloud.active_sh_degree = cloud.active_sh_degree;
  out.cloud.gaussians.reserve(cloud.size() + cloud.size() / 4);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian3D& g = cloud.gaussians[i];
    switch (decisions[i]) {
      case DensifyAction::kKeep:
        out.cloud.gaussians.push_back(g);
        out.source_index.push_back(static_cast<std::int64_t>(i));
        break;
      case DensifyAction::kClone: {
        out.cloud.gaussians.push_back(g);
        out.source_index.push_back(static_cast<std::int64_t>(i));
        Gaussian3D copy = g;
        if (i < position_grads.size() && position_lr > 0.0) {
          copy.position -= position_lr * position_grads[i];
        }
        out.cloud.gaussians.push_back(copy);
        out.source_index.push_back(-1);
        ++out.clones;
        break;
      }
      case DensifyAction::kSplit: {
        // Per-(seed, gaussian) stream so split sampling does not depend on
        // event ordering or resume points.
        Rng rng(Rng::mix(seed, i));
        const Mat3 rot = quaternion_to_rotation(g.rotation);
        const Vec3 scale = g.log_scale.array().exp();
        for (int child = 0; child < 2; ++child) {
          Gaussian3D c = g;
          const Vec3 sample = normal3(rng);
          c.position = g.position + rot * (scale.asDiagonal() * sample);
          c.log_scale = g.log_scale.array() - std::log(kSplitScaleShrink);
          out.cloud.gaussians.push_back(c);
          out.source_index.push_back(-1);
        }
        ++out.splits;
        break;
      }
    }
  }
  return out;
}

PruneResult prune_and_reset(const GaussianCloud& cloud, int iter, const DensifyConfig& config) {
  PruneResult out;
  out.cloud.active_sh_degree = cloud.active_sh_degree;
  out.cloud.gaussians.reserve(cloud.size());

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian3D& g = cloud.gaussians[i];
    const double opacity = sigmoid(g.opacity_logit);
    bool drop = opacity < config.prune_opacity_threshold;
    if (!drop && config.prune_world_scale > 0.0) {
      drop = g.log_scale.array().exp().maxCoeff() > config.prune_world_scale;
    }
    if (drop) {
      ++out.pruned;
    } else {
      out.cloud.gaussians.push_back(g);
      out.source_index.push_back(static_cast<std::int64_t>(i));
    }
  }
  if (out.cloud.empty()) {
    throw std::runtime_error("prune_and_reset: pruning removed every Gaussian (degenerate run)");
  }

  if (config.opacity_reset_interval > 0 && iter > 0 && iter % config.opacity_reset_interval == 0) {
    const double ceiling_logit = logit(kOpacityResetCeiling);
    for (Gaussian3D& g : out.cloud.gaussians) {
      g.opacity_logit = std::min(g.opacity_logit, ceiling_logit);
    }
    out.opacity_was_reset = true;
  }
  return out;
}

}  // namespace attnsplat

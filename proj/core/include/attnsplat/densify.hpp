// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"

#include <cstdint>
#include <vector>

namespace attnsplat {

enum class DensifyMode { kBaseline, kOpacityWeighted };

enum class DensifyAction : std::uint8_t { kKeep, kClone, kSplit };

/// Running per-Gaussian accumulators over views between densification
/// events. `record_view` adds one view's NDC-gradient norm with its
/// transmittance weight.
struct DensifyStats {
  std::vector<double> grad_norm_sum;     // sum_k ||grad_ndc_k||
  std::vector<double> weighted_grad_sum; // sum_k t_k ||grad_ndc_k||
  std::vector<double> transmittance_sum; // sum_k t_k
  std::vector<std::uint32_t> view_count; // views where the Gaussian was visible

  explicit DensifyStats(std::size_t n = 0) { reset(n); }
  void reset(std::size_t n);
  std::size_t size() const { return grad_norm_sum.size(); }
};

struct DensifyConfig {
  double tau_pos = 2e-4;                 // NDC-gradient threshold
  double scale_split_threshold = 0.0;    // world units; above it Split, else Clone
  int interval = 100;                    // iterations between events
  int start_iter = 500;
  int stop_iter = 15000;
  int opacity_reset_interval = 3000;
  double prune_opacity_threshold = 0.005;
  double prune_world_scale = 0.0;        // 0 disables the size prune
  DensifyMode mode = DensifyMode::kOpacityWeighted;
};

/// Adds one view's contribution for `gaussian_index`. `t_view` is the
/// Gaussian's accumulated blend weight in the view; negative values are
/// rejected. Invisible Gaussians must simply not be recorded.
void record_view(DensifyStats& stats, std::size_t gaussian_index, const Vec2& ndc_grad,
                 double t_view);

/// Criterion value: mean gradient norm over views (baseline) or the
/// transmittance-weighted mean (opacity-weighted). Gaussians with zero
/// accumulated transmittance report 0 (never densified).
double densify_criterion(const DensifyStats& stats, std::size_t index, DensifyMode mode);

/// Per-Gaussian Keep/Clone/Split decision against tau_pos; the split
/// branch requires the largest activated scale to exceed the threshold.
std::vector<DensifyAction> densify_decision(const DensifyStats& stats,
                                            const GaussianCloud& cloud,
                                            const DensifyConfig& config);

/// Result of applying decisions: the new cloud plus, per new Gaussian,
/// the index of the source Gaussian (or -1 for fresh optimizer state).
struct DensifyResult {
  GaussianCloud cloud;
  std::vector<std::int64_t> source_index; // old index whose optimizer state carries over
  int clones = 0;
  int splits = 0;
};

/// Clone duplicates the Gaussian, nudging the copy one gradient step
/// along -position_grad. Split draws two children from the parent
/// density (seeded), shrinks scales by ln(1.6) and drops the parent.
DensifyResult apply_densify(const GaussianCloud& cloud, const std::vector<DensifyAction>& decisions,
                            const std::vector<Vec3>& position_grads, double position_lr,
                            std::uint64_t seed);

struct PruneResult {
  GaussianCloud cloud;
  std::vector<std::int64_t> source_index;
  int pruned = 0;
  bool opacity_was_reset = false;
};

/// Removes Gaussians below the opacity threshold (and oversized ones when
/// enabled), and on the reset cadence clamps all opacities down to 0.01.
/// Throws if pruning would empty the cloud.
PruneResult prune_and_reset(const GaussianCloud& cloud, int iter, const DensifyConfig& config);

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/adam.hpp"
#include "attnsplat/densify.hpp"
#include "attnsplat/init.hpp"
#include "attnsplat/losses.hpp"
#include "attnsplat/synth.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace attnsplat {

/// Loss-term selection for the ablation ladder. The densification
/// criterion is configured separately through DensifyConfig::mode.
enum class TrainMode { kBaseline, kGeo, kFull };

/// Which per-view scalar feeds the transmittance weighting: the summed
/// blend weight (default) or the summed pre-composite transmittance.
enum class TViewSource { kBlendWeight, kTransmittance };

struct TrainConfig {
  int total_iters = 7000;
  std::uint64_t seed = 1;
  TrainMode mode = TrainMode::kFull;

  LearningRates lr; // position rates are in units of scene extent diagonal
  AdamConfig adam;
  ScheduleParams schedule; // total_iters is overwritten from this config
  EdgeOptions edge;

  DensifyConfig densify;
  double split_scale_fraction = 0.01; // of extent diagonal; resolved into densify
  double prune_scale_fraction = 0.1;  // oversize prune, active after the first reset
  TViewSource tview_source = TViewSource::kBlendWeight;

  int init_count = 300;
  double init_variance_scale = 0.5;
  double init_opacity = 0.1;

  bool dssim_in_baseline = false; // adds the reference D-SSIM term to the baseline loss
  double dssim_lambda = 0.2;

  int sh_degree_interval = 1000; // raise the active SH degree every this many iters
  int eval_interval = 250;
  std::vector<int> checkpoint_iters;
  int threads = 1;
};

struct MetricsRow {
  int iter = 0;
  double total = 0, l1 = 0, geometric = 0, appearance = 0, schedule = 0;
  std::size_t cloud_size = 0;
  double train_psnr = std::numeric_limits<double>::quiet_NaN();
  double test_psnr = std::numeric_limits<double>::quiet_NaN();
};

std::string metrics_csv_header();
std::string metrics_row_to_csv(const MetricsRow& row);

/// Complete optimizer state; checkpointing this mid-run and resuming
/// reproduces the remaining trajectory bit-exactly.
struct TrainState {
  GaussianCloud cloud;
  AdamState adam;
  DensifyStats stats;
  int iter = 0;
};

void save_train_state(const TrainState& state, const std::string& path);
TrainState load_train_state(const std::string& path);

struct TrainCallbacks {
  std::function<void(const TrainState&)> on_checkpoint;
  std::function<void(const std::string&)> on_event; // densify/prune/log lines
};

struct TrainResult {
  GaussianCloud cloud;
  std::vector<MetricsRow> history;
  TrainState final_state;
  std::uint64_t init_digest = 0; // digest of the starting cloud, for audits
};

/// Runs the per-iteration render / loss / backward / step loop with the
/// densification cadence, SH schedule and periodic evaluation.
TrainResult train(const LoadedScene& scene, const TrainConfig& config,
                  const TrainState* resume = nullptr, const TrainCallbacks& callbacks = {});

/// Mean PSNR of renders against ground truth over the given views,
/// quantized to the scene's stored bit depth before comparison.
double evaluate_psnr(const GaussianCloud& cloud, const LoadedScene& scene,
                     const std::vector<std::size_t>& view_indices, int threads = 1);

}  // namespace attnsplat

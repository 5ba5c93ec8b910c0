// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/train.hpp"

#include "attnsplat/checkpoint.hpp"
#include "attnsplat/metrics.hpp"
#include "attnsplat/render.hpp"
#include "attnsplat/rng.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace attnsplat {

namespace {

constexpr char kStateMagic[8] = {'A', 'S', 'P', 'L', 'A', 'T', 'S', 'T'};
constexpr std::uint32_t kStateVersion = 1;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct IterationLoss {
  double value = 0.0;
  ImageBuffer grad;
  LossComponents components;
};

IterationLoss compute_loss(const ImageBuffer& gt, const ImageBuffer& render, int iter,
                           const TrainConfig& config) {
  IterationLoss out;
  switch (config.mode) {
    case TrainMode::kBaseline: {
      LossValueGrad l1 = l1_loss(gt, render);
      out.components.l1 = l1.value;
      out.components.schedule = 0.0;
      if (config.dssim_in_baseline) {
        ImageBuffer dssim_grad;
        const double s = ssim_with_gradient(gt, render, dssim_grad);
        const double lambda = config.dssim_lambda;
        out.value = (1.0 - lambda) * l1.value + lambda * (1.0 - s);
        out.grad = ImageBuffer(render.width, render.height);
        for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
          out.grad.data[i] = (1.0 - lambda) * l1.grad.data[i] - lambda * dssim_grad.data[i];
        }
      } else {
        out.value = l1.value;
        out.grad = std::move(l1.grad);
      }
      out.components.total = out.value;
      return out;
    }
    case TrainMode::kGeo: {
      const double f = schedule_weight(iter, config.schedule);
      LossValueGrad l1 = l1_loss(gt, render);
      const WeightMap w = geometric_weights(gt, render, config.edge);
      LossValueGrad geo = geometric_loss(gt, render, w);
      out.value = l1.value + f * geo.value;
      out.grad = ImageBuffer(render.width, render.height);
      for (std::size_t i = 0; i < out.grad.data.size(); ++i) {
        out.grad.data[i] = l1.grad.data[i] + f * geo.grad.data[i];
      }
      out.components.l1 = l1.value;
      out.components.geometric = geo.value;
      out.components.schedule = f;
      out.components.total = out.value;
      return out;
    }
    case TrainMode::kFull: {
      LossValueGrad full = total_loss(gt, render, iter, config.schedule, config.edge,
                                      out.components);
      out.value = full.value;
      out.grad = std::move(full.grad);
      return out;
    }
  }
  throw std::logic_error("compute_loss: unhandled mode");
}

void write_param_block(std::ostream& out, const ParamGrads& p) {
  const std::uint64_t n = p.size();
  for (std::uint64_t i = 0; i < n; ++i) {
    out.write(reinterpret_cast<const char*>(p.position[i].data()), 3 * sizeof(double));
    out.write(reinterpret_cast<const char*>(p.log_scale[i].data()), 3 * sizeof(double));
    out.write(reinterpret_cast<const char*>(p.rotation[i].data()), 4 * sizeof(double));
    out.write(reinterpret_cast<const char*>(&p.opacity_logit[i]), sizeof(double));
    out.write(reinterpret_cast<const char*>(p.sh[i].data()), 48 * sizeof(double));
  }
}

void read_param_block(std::istream& in, ParamGrads& p, std::size_t n) {
  p.resize_zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(p.position[i].data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(p.log_scale[i].data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(p.rotation[i].data()), 4 * sizeof(double));
    in.read(reinterpret_cast<char*>(&p.opacity_logit[i]), sizeof(double));
    in.read(reinterpret_cast<char*>(p.sh[i].data()), 48 * sizeof(double));
  }
}

}  // namespace

std::string metrics_csv_header() {
  return "iter,total,l1,geo,app,f,cloud_size,train_psnr,test_psnr";
}

std::string metrics_row_to_csv(const MetricsRow& row) {
  std::ostringstream out;
  out << row.iter << "," << fmt_double(row.total) << "," << fmt_double(row.l1) << ","
      << fmt_double(row.geometric) << "," << fmt_double(row.appearance) << ","
      << fmt_double(row.schedule) << "," << row.cloud_size << ",";
  if (!std::isnan(row.train_psnr)) out << fmt_double(row.train_psnr);
  out << ",";
  if (!std::isnan(row.test_psnr)) out << fmt_double(row.test_psnr);
  return out.str();
}

void save_train_state(const TrainState& state, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(kStateMagic, sizeof(kStateMagic));
    const std::uint32_t version = kStateVersion;
    const std::uint64_t count = state.cloud.size();
    const std::uint32_t degree = static_cast<std::uint32_t>(state.cloud.active_sh_degree);
    const std::uint64_t iter = static_cast<std::uint64_t>(state.iter);
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    out.write(reinterpret_cast<const char*>(&degree), sizeof(degree));
    out.write(reinterpret_cast<const char*>(&iter), sizeof(iter));

    for (const Gaussian3D& g : state.cloud.gaussians) {
      out.write(reinterpret_cast<const char*>(g.position.data()), 3 * sizeof(double));
      out.write(reinterpret_cast<const char*>(g.log_scale.data()), 3 * sizeof(double));
      out.write(reinterpret_cast<const char*>(g.rotation.data()), 4 * sizeof(double));
      out.write(reinterpret_cast<const char*>(&g.opacity_logit), sizeof(double));
      out.write(reinterpret_cast<const char*>(g.sh.data()), 48 * sizeof(double));
    }
    write_param_block(out, state.adam.m);
    write_param_block(out, state.adam.v);
    out.write(reinterpret_cast<const char*>(state.stats.grad_norm_sum.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    out.write(reinterpret_cast<const char*>(state.stats.weighted_grad_sum.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    out.write(reinterpret_cast<const char*>(state.stats.transmittance_sum.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
    out.write(reinterpret_cast<const char*>(state.stats.view_count.data()),
              static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
    if (!out) throw std::runtime_error("failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

TrainState load_train_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open train state " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kStateMagic, sizeof(kStateMagic)) != 0) {
    throw std::runtime_error(path + ": not an attnsplat train state");
  }
  std::uint32_t version = 0, degree = 0;
  std::uint64_t count = 0, iter = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  in.read(reinterpret_cast<char*>(&degree), sizeof(degree));
  in.read(reinterpret_cast<char*>(&iter), sizeof(iter));
  if (!in || version != kStateVersion) {
    throw std::runtime_error(path + ": unsupported train state version");
  }

  TrainState state;
  state.iter = static_cast<int>(iter);
  state.cloud.active_sh_degree = static_cast<int>(degree);
  state.cloud.gaussians.resize(count);
  for (Gaussian3D& g : state.cloud.gaussians) {
    in.read(reinterpret_cast<char*>(g.position.data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(g.log_scale.data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(g.rotation.data()), 4 * sizeof(double));
    in.read(reinterpret_cast<char*>(&g.opacity_logit), sizeof(double));
    in.read(reinterpret_cast<char*>(g.sh.data()), 48 * sizeof(double));
  }
  read_param_block(in, state.adam.m, count);
  read_param_block(in, state.adam.v, count);
  state.stats.reset(count);
  in.read(reinterpret_cast<char*>(state.stats.grad_norm_sum.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(state.stats.weighted_grad_sum.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(state.stats.transmittance_sum.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(state.stats.view_count.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (!in) throw std::runtime_error(path + ": truncated train state");
  return state;
}

double evaluate_psnr(const GaussianCloud& cloud, const LoadedScene& scene,
                     const std::vector<std::size_t>& view_indices, int threads) {
  if (view_indices.empty()) return std::numeric_limits<double>::quiet_NaN();
  RenderOptions opts;
  opts.background = scene.manifest.background;
  opts.threads = threads;
  double sum = 0.0;
  for (std::size_t vi : view_indices) {
    RenderAux aux;
    const ImageBuffer render =
        rasterize_forward(cloud, scene.manifest.views[vi].camera, aux, opts);
    sum += psnr(quantize(render, scene.manifest.image_maxval), scene.images[vi]);
  }
  return sum / static_cast<double>(view_indices.size());
}

TrainResult train(const LoadedScene& scene, const TrainConfig& config,
                  const TrainState* resume, const TrainCallbacks& callbacks) {
  if (scene.manifest.views.size() < 2) {
    throw std::invalid_argument("train: need at least 2 views");
  }
  if (config.total_iters < 0) throw std::invalid_argument("train: negative iteration count");

  const double extent_diag = scene.manifest.extent.diagonal();

  // Resolve extent-relative settings into world units.
  LearningRates rates = config.lr;
  rates.position_init *= extent_diag;
  rates.position_final *= extent_diag;

  DensifyConfig densify = config.densify;
  densify.scale_split_threshold = config.split_scale_fraction * extent_diag;
  densify.prune_world_scale = 0.0; // oversize prune arms after the first opacity reset

  ScheduleParams schedule = config.schedule;
  schedule.total_iters = std::max(1, config.total_iters);

  TrainConfig cfg = config;
  cfg.schedule = schedule;

  TrainState state;
  if (resume != nullptr) {
    state = *resume;
    if (state.cloud.empty()) throw std::invalid_argument("train: resume state has no Gaussians");
  } else {
    SLVInit init;
    init.count = config.init_count;
    init.extent = scene.manifest.extent;
    init.variance_scale = config.init_variance_scale;
    init.opacity = config.init_opacity;
    state.cloud = slv_initialize(init, config.seed);
    state.adam.resize_zero(state.cloud.size());
    state.stats.reset(state.cloud.size());
    state.iter = 0;
  }

  const std::vector<std::size_t> train_views = train_view_indices(scene.manifest.views.size());
  const std::vector<std::size_t> test_views = test_view_indices(scene.manifest.views.size());

  RenderOptions ropts;
  ropts.background = scene.manifest.background;
  ropts.threads = config.threads;

  TrainResult result;
  result.init_digest = checkpoint_digest(state.cloud);
  result.history.reserve(static_cast<std::size_t>(config.total_iters) + 1);

  std::vector<std::size_t> epoch_order;
  std::size_t cached_epoch = static_cast<std::size_t>(-1);

  for (int iter = state.iter + 1; iter <= config.total_iters; ++iter) {
    // Epoch-wise seeded shuffle: every view is visited once per epoch and
    // the order is reconstructible from (seed, epoch) alone.
    const std::size_t epoch = static_cast<std::size_t>(iter - 1) / train_views.size();
    const std::size_t slot = static_cast<std::size_t>(iter - 1) % train_views.size();
    if (epoch != cached_epoch) {
      epoch_order = train_views;
      Rng shuffle_rng(Rng::mix(config.seed, 1000000000ull + epoch));
      shuffle_rng.shuffle(epoch_order);
      cached_epoch = epoch;
    }
    const std::size_t view = epoch_order[slot];

    state.cloud.active_sh_degree =
        std::min(kMaxShDegree, cfg.sh_degree_interval > 0 ? iter / cfg.sh_degree_interval
                                                          : kMaxShDegree);

    RenderAux aux;
    const ImageBuffer render =
        rasterize_forward(state.cloud, scene.manifest.views[view].camera, aux, ropts);
    IterationLoss loss = compute_loss(scene.images[view], render, iter, cfg);
    ParamGrads grads = rasterize_backward(state.cloud, scene.manifest.views[view].camera, aux,
                                          loss.grad, ropts);

    // Accumulate densification statistics for visible Gaussians.
    for (std::size_t i = 0; i < state.cloud.size(); ++i) {
      if (!aux.visible[i]) continue;
      const double t_view = cfg.tview_source == TViewSource::kBlendWeight
                                ? aux.blend_weight_sum[i]
                                : aux.transmittance_sum[i];
      record_view(state.stats, i, aux.ndc_grad[i], t_view);
    }

    const int skipped = adam_step(state.cloud, grads, state.adam, rates, cfg.adam, iter,
                                  cfg.total_iters);
    if (skipped > 0 && callbacks.on_event) {
      callbacks.on_event("iter " + std::to_string(iter) + ": skipped " +
                         std::to_string(skipped) + " non-finite gradient updates");
    }

    // Densification cadence.
    if (iter >= densify.start_iter && iter <= densify.stop_iter && densify.interval > 0 &&
        (iter - densify.start_iter) % densify.interval == 0) {
      const auto decisions = densify_decision(state.stats, state.cloud, densify);
      DensifyResult densified = apply_densify(state.cloud, decisions, grads.position,
                                              position_lr_at(rates, iter, cfg.total_iters),
                                              Rng::mix(cfg.seed, 2000000000ull + static_cast<std::uint64_t>(iter)));
      state.adam.remap(densified.source_index);

      DensifyConfig prune_cfg = densify;
      if (densify.opacity_reset_interval > 0 && iter > densify.opacity_reset_interval) {
        prune_cfg.prune_world_scale = cfg.prune_scale_fraction * extent_diag;
      }
      PruneResult pruned = prune_and_reset(densified.cloud, iter, prune_cfg);
      state.adam.remap(pruned.source_index);
      state.cloud = std::move(pruned.cloud);
      state.stats.reset(state.cloud.size());

      if (callbacks.on_event) {
        std::ostringstream line;
        line << "iter " << iter << ": densify mode="
             << (densify.mode == DensifyMode::kBaseline ? "baseline" : "opacity_weighted")
             << " clones=" << densified.clones << " splits=" << densified.splits
             << " pruned=" << pruned.pruned << (pruned.opacity_was_reset ? " opacity_reset" : "")
             << " cloud=" << state.cloud.size();
        callbacks.on_event(line.str());
      }
    } else if (densify.opacity_reset_interval > 0 && iter % densify.opacity_reset_interval == 0 &&
               iter <= densify.stop_iter) {
      // Reset can fall between densify events.
      const double ceiling = logit(0.01);
      for (Gaussian3D& g : state.cloud.gaussians) {
        g.opacity_logit = std::min(g.opacity_logit, ceiling);
      }
      if (callbacks.on_event) {
        callbacks.on_event("iter " + std::to_string(iter) + ": opacity reset");
      }
    }

    MetricsRow row;
    row.iter = iter;
    row.total = loss.components.total;
    row.l1 = loss.components.l1;
    row.geometric = loss.components.geometric;
    row.appearance = loss.components.appearance;
    row.schedule = loss.components.schedule;
    row.cloud_size = state.cloud.size();
    if (cfg.eval_interval > 0 && (iter % cfg.eval_interval == 0 || iter == cfg.total_iters)) {
      row.train_psnr = evaluate_psnr(state.cloud, scene, train_views, cfg.threads);
      row.test_psnr = evaluate_psnr(state.cloud, scene, test_views, cfg.threads);
    }
    result.history.push_back(row);

    state.iter = iter;
    for (int ckpt_iter : cfg.checkpoint_iters) {
      if (ckpt_iter == iter && callbacks.on_checkpoint) callbacks.on_checkpoint(state);
    }
  }

  result.cloud = state.cloud;
  result.final_state = std::move(state);
  return result;
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/checkpoint.hpp"
#include "attnsplat/edge.hpp"
#include "attnsplat/metrics.hpp"
#include "attnsplat/render.hpp"
#include "attnsplat/run_config.hpp"
#include "attnsplat/synth.hpp"
#include "attnsplat/train.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace attnsplat;

namespace {

constexpr char kVersion[] = "attnsplat 0.1.0";

// Run directories resolve against ATTNSPLAT_RUN_ROOT when set.
fs::path resolve_run_dir(const std::string& dir) {
  const fs::path p(dir);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv("ATTNSPLAT_RUN_ROOT")) {
    return fs::path(root) / p;
  }
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Config assembly: defaults, then an optional JSON file, then --mode, then
// individual namespaced flag overrides.

struct ConfigCli {
  std::string config_path;
  std::string mode;

  std::optional<int> iters, threads, eval_interval, sh_degree_interval, init_count;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> checkpoint_iters;
  std::optional<double> init_variance_scale, init_opacity, dssim_lambda;
  std::optional<bool> dssim;

  std::optional<double> lr_position_init, lr_position_final, lr_sh, lr_sh_rest_divisor,
      lr_opacity, lr_scale, lr_rotation;
  std::optional<double> adam_beta1, adam_beta2, adam_eps;
  std::optional<double> schedule_s, schedule_m;
  std::optional<int> edge_radius;
  std::optional<double> edge_blur_sigma;

  std::optional<std::string> densify_mode, densify_tview;
  std::optional<double> densify_tau, densify_prune_opacity, densify_split_scale_fraction,
      densify_prune_scale_fraction;
  std::optional<int> densify_interval, densify_start, densify_stop,
      densify_opacity_reset_interval;
};

void add_config_options(CLI::App* cmd, ConfigCli& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration file");
  cmd->add_option("--mode", c.mode,
                  "ablation mode: baseline, geo, geo+opacity or full "
                  "(sets loss terms and densify criterion)");

  cmd->add_option("--train.iters", c.iters);
  cmd->add_option("--train.seed", c.seed);
  cmd->add_option("--train.threads", c.threads);
  cmd->add_option("--train.eval_interval", c.eval_interval);
  cmd->add_option("--train.checkpoint_iters", c.checkpoint_iters);
  cmd->add_option("--train.sh_degree_interval", c.sh_degree_interval);
  cmd->add_option("--train.init_count", c.init_count);
  cmd->add_option("--train.init_variance_scale", c.init_variance_scale);
  cmd->add_option("--train.init_opacity", c.init_opacity);
  cmd->add_option("--train.dssim", c.dssim);
  cmd->add_option("--train.dssim_lambda", c.dssim_lambda);

  cmd->add_option("--lr.position_init", c.lr_position_init);
  cmd->add_option("--lr.position_final", c.lr_position_final);
  cmd->add_option("--lr.sh", c.lr_sh);
  cmd->add_option("--lr.sh_rest_divisor", c.lr_sh_rest_divisor);
  cmd->add_option("--lr.opacity", c.lr_opacity);
  cmd->add_option("--lr.scale", c.lr_scale);
  cmd->add_option("--lr.rotation", c.lr_rotation);

  cmd->add_option("--adam.beta1", c.adam_beta1);
  cmd->add_option("--adam.beta2", c.adam_beta2);
  cmd->add_option("--adam.eps", c.adam_eps);

  cmd->add_option("--schedule.s", c.schedule_s, "sigmoid steepness");
  cmd->add_option("--schedule.m", c.schedule_m, "decay node as a fraction of training");

  cmd->add_option("--edge.radius", c.edge_radius, "edge enhancement box radius");
  cmd->add_option("--edge.blur_sigma", c.edge_blur_sigma);

  cmd->add_option("--densify.mode", c.densify_mode, "baseline or opacity_weighted");
  cmd->add_option("--densify.tau_pos", c.densify_tau);
  cmd->add_option("--densify.interval", c.densify_interval);
  cmd->add_option("--densify.start", c.densify_start);
  cmd->add_option("--densify.stop", c.densify_stop);
  cmd->add_option("--densify.opacity_reset_interval", c.densify_opacity_reset_interval);
  cmd->add_option("--densify.prune_opacity", c.densify_prune_opacity);
  cmd->add_option("--densify.split_scale_fraction", c.densify_split_scale_fraction);
  cmd->add_option("--densify.prune_scale_fraction", c.densify_prune_scale_fraction);
  cmd->add_option("--densify.tview", c.densify_tview, "blend_weight or transmittance");
}

RunConfig build_run_config(const ConfigCli& c) {
  RunConfig config;
  if (!c.config_path.empty()) config = load_run_config(c.config_path);
  if (!c.mode.empty()) apply_mode(config, c.mode);

  TrainConfig& t = config.train;
  if (c.iters) t.total_iters = *c.iters;
  if (c.seed) t.seed = *c.seed;
  if (c.threads) t.threads = *c.threads;
  if (c.eval_interval) t.eval_interval = *c.eval_interval;
  if (c.checkpoint_iters) t.checkpoint_iters = *c.checkpoint_iters;
  if (c.sh_degree_interval) t.sh_degree_interval = *c.sh_degree_interval;
  if (c.init_count) t.init_count = *c.init_count;
  if (c.init_variance_scale) t.init_variance_scale = *c.init_variance_scale;
  if (c.init_opacity) t.init_opacity = *c.init_opacity;
  if (c.dssim) t.dssim_in_baseline = *c.dssim;
  if (c.dssim_lambda) t.dssim_lambda = *c.dssim_lambda;

  if (c.lr_position_init) t.lr.position_init = *c.lr_position_init;
  if (c.lr_position_final) t.lr.position_final = *c.lr_position_final;
  if (c.lr_sh) t.lr.sh = *c.lr_sh;
  if (c.lr_sh_rest_divisor) t.lr.sh_rest_divisor = *c.lr_sh_rest_divisor;
  if (c.lr_opacity) t.lr.opacity = *c.lr_opacity;
  if (c.lr_scale) t.lr.scale = *c.lr_scale;
  if (c.lr_rotation) t.lr.rotation = *c.lr_rotation;

  if (c.adam_beta1) t.adam.beta1 = *c.adam_beta1;
  if (c.adam_beta2) t.adam.beta2 = *c.adam_beta2;
  if (c.adam_eps) t.adam.eps = *c.adam_eps;

  if (c.schedule_s) t.schedule.steepness = *c.schedule_s;
  if (c.schedule_m) t.schedule.decay_node = *c.schedule_m;

  if (c.edge_radius) t.edge.enhance_radius = *c.edge_radius;
  if (c.edge_blur_sigma) t.edge.blur_sigma = *c.edge_blur_sigma;

  if (c.densify_mode) {
    if (*c.densify_mode == "baseline") {
      t.densify.mode = DensifyMode::kBaseline;
    } else if (*c.densify_mode == "opacity_weighted") {
      t.densify.mode = DensifyMode::kOpacityWeighted;
    } else {
      throw CLI::ValidationError("--densify.mode",
                                 "expected 'baseline' or 'opacity_weighted'");
    }
  }
  if (c.densify_tau) t.densify.tau_pos = *c.densify_tau;
  if (c.densify_interval) t.densify.interval = *c.densify_interval;
  if (c.densify_start) t.densify.start_iter = *c.densify_start;
  if (c.densify_stop) t.densify.stop_iter = *c.densify_stop;
  if (c.densify_opacity_reset_interval) {
    t.densify.opacity_reset_interval = *c.densify_opacity_reset_interval;
  }
  if (c.densify_prune_opacity) t.densify.prune_opacity_threshold = *c.densify_prune_opacity;
  if (c.densify_split_scale_fraction) t.split_scale_fraction = *c.densify_split_scale_fraction;
  if (c.densify_prune_scale_fraction) t.prune_scale_fraction = *c.densify_prune_scale_fraction;
  if (c.densify_tview) {
    if (*c.densify_tview == "blend_weight") {
      t.tview_source = TViewSource::kBlendWeight;
    } else if (*c.densify_tview == "transmittance") {
      t.tview_source = TViewSource::kTransmittance;
    } else {
      throw CLI::ValidationError("--densify.tview",
                                 "expected 'blend_weight' or 'transmittance'");
    }
  }
  return config;
}

// ---------------------------------------------------------------------------
// synth

struct SynthCli {
  std::string out;
  SynthSpec spec;
  std::string rig = "orbit";
  std::vector<double> background{0, 0, 0};
};

int cmd_synth(const SynthCli& cli) {
  SynthSpec spec = cli.spec;
  if (cli.rig == "orbit") {
    spec.rig = RigKind::kOrbit;
  } else if (cli.rig == "grid") {
    spec.rig = RigKind::kGrid;
  } else {
    throw CLI::ValidationError("--rig", "expected 'orbit' or 'grid'");
  }
  if (cli.background.size() != 3) {
    throw CLI::ValidationError("--background", "expected three components");
  }
  spec.background = Vec3(cli.background[0], cli.background[1], cli.background[2]);

  const SceneManifest manifest = generate_scene(spec, cli.out);
  std::cout << "scene " << cli.out << " views " << manifest.views.size() << " gaussians "
            << spec.n_gaussians << " resolution " << spec.resolution << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainCli {
  std::string scene;
  std::string run;
  ConfigCli config;
  std::string resume_state;
  bool debug_dumps = false;
};

void dump_debug_maps(const fs::path& dir, int iter, const LoadedScene& scene,
                     const GaussianCloud& cloud, const TrainConfig& config) {
  fs::create_directories(dir);
  const std::size_t view = train_view_indices(scene.manifest.views.size()).front();
  RenderOptions ropts;
  ropts.background = scene.manifest.background;
  ropts.threads = config.threads;
  RenderAux aux;
  const ImageBuffer render =
      rasterize_forward(cloud, scene.manifest.views[view].camera, aux, ropts);
  const ImageBuffer& gt = scene.images[view];

  char prefix[32];
  std::snprintf(prefix, sizeof(prefix), "iter_%06d_", iter);
  save_pgm(enhanced_edges(gt, config.edge), (dir / (std::string(prefix) + "edges_gt.pgm")).string());
  save_pgm(enhanced_edges(render, config.edge),
           (dir / (std::string(prefix) + "edges_render.pgm")).string());
  save_pgm(geometric_weights(gt, render, config.edge),
           (dir / (std::string(prefix) + "weights_geo.pgm")).string());
  save_ppm(appearance_weights(gt, render),
           (dir / (std::string(prefix) + "weights_app.ppm")).string(), 255);
  save_pgm(aux.final_transmittance,
           (dir / (std::string(prefix) + "transmittance.pgm")).string());
}

int cmd_train(const TrainCli& cli) {
  const RunConfig config = build_run_config(cli.config);
  const fs::path run_dir = resolve_run_dir(cli.run);
  fs::create_directories(run_dir);

  const LoadedScene scene = load_scene(cli.scene);

  write_text(run_dir / "config.json", run_config_to_json(config));
  write_text(run_dir / "version.txt", std::string(kVersion) + "\n");

  std::ofstream events(run_dir / "events.log");
  TrainCallbacks callbacks;
  callbacks.on_event = [&](const std::string& line) { events << line << "\n"; };
  callbacks.on_checkpoint = [&](const TrainState& state) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_%06d", state.iter);
    save_checkpoint(state.cloud, (run_dir / (std::string(name) + ".ckpt")).string());
    save_train_state(state, (run_dir / (std::string(name) + ".state")).string());
    if (cli.debug_dumps) {
      dump_debug_maps(run_dir / "debug", state.iter, scene, state.cloud, config.train);
    }
  };

  std::optional<TrainState> resume;
  if (!cli.resume_state.empty()) {
    resume = load_train_state(cli.resume_state);
  }

  const TrainResult result =
      train(scene, config.train, resume ? &*resume : nullptr, callbacks);

  std::ofstream metrics(run_dir / "metrics.csv");
  metrics << metrics_csv_header() << "\n";
  for (const MetricsRow& row : result.history) metrics << metrics_row_to_csv(row) << "\n";
  if (!metrics) throw std::runtime_error("failed writing metrics.csv");

  save_checkpoint(result.cloud, (run_dir / "final.ckpt").string());
  save_train_state(result.final_state, (run_dir / "final.state").string());
  write_text(run_dir / "init_digest.txt", std::to_string(result.init_digest) + "\n");

  const double final_test = result.history.empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : result.history.back().test_psnr;
  std::cout << "run " << run_dir.string() << " iters " << config.train.total_iters
            << " cloud " << result.cloud.size() << " test_psnr "
            << (std::isnan(final_test) ? 0.0 : final_test) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// render

struct RenderCli {
  std::string checkpoint;
  std::string scene;
  std::string out;
  std::string views = "test";
  int threads = 0;
  bool dump_transmittance = false;
};

std::vector<std::size_t> select_views(const SceneManifest& manifest, const std::string& selector) {
  if (selector == "all") {
    std::vector<std::size_t> all(manifest.views.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  if (selector == "test") return test_view_indices(manifest.views.size());
  if (selector == "train") return train_view_indices(manifest.views.size());
  // Comma-separated camera names.
  std::vector<std::size_t> picked;
  std::stringstream ss(selector);
  std::string name;
  while (std::getline(ss, name, ',')) {
    bool found = false;
    for (std::size_t i = 0; i < manifest.views.size(); ++i) {
      if (manifest.views[i].name == name) {
        picked.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) {
      throw CLI::ValidationError("--views", "unknown camera id '" + name + "'");
    }
  }
  return picked;
}

int cmd_render(const RenderCli& cli) {
  const GaussianCloud cloud = load_checkpoint(cli.checkpoint);
  const SceneManifest manifest = load_manifest((fs::path(cli.scene) / "manifest.txt").string());
  const auto views = select_views(manifest, cli.views);
  fs::create_directories(cli.out);

  RenderOptions opts;
  opts.background = manifest.background;
  opts.threads = cli.threads;
  for (std::size_t vi : views) {
    RenderAux aux;
    const ImageBuffer img = rasterize_forward(cloud, manifest.views[vi].camera, aux, opts);
    const fs::path out_path = fs::path(cli.out) / (manifest.views[vi].name + ".ppm");
    save_ppm(clamp01(img), out_path.string(), manifest.image_maxval);
    if (cli.dump_transmittance) {
      save_pgm(aux.final_transmittance,
               (fs::path(cli.out) / (manifest.views[vi].name + "_transmittance.pgm")).string());
    }
    std::cout << out_path.string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalCli {
  std::string checkpoint;
  std::string run;
  std::string scene;
  std::string out;
  std::string views = "test";
  int threads = 0;
};

MetricReport evaluate_checkpoint(const GaussianCloud& cloud, const LoadedScene& scene,
                                 const std::vector<std::size_t>& views, int threads) {
  RenderOptions opts;
  opts.background = scene.manifest.background;
  opts.threads = threads;
  std::vector<std::string> names;
  std::vector<double> psnrs, ssims;
  for (std::size_t vi : views) {
    RenderAux aux;
    const ImageBuffer render =
        rasterize_forward(cloud, scene.manifest.views[vi].camera, aux, opts);
    const ImageBuffer snapped = quantize(render, scene.manifest.image_maxval);
    names.push_back(scene.manifest.views[vi].name);
    psnrs.push_back(psnr(snapped, scene.images[vi]));
    ssims.push_back(ssim(snapped, scene.images[vi]));
  }
  return make_report(std::move(names), std::move(psnrs), std::move(ssims));
}

int cmd_eval(const EvalCli& cli) {
  std::string ckpt = cli.checkpoint;
  if (ckpt.empty()) {
    if (cli.run.empty()) {
      throw CLI::ValidationError("--checkpoint", "need --checkpoint or --run");
    }
    ckpt = (resolve_run_dir(cli.run) / "final.ckpt").string();
  }
  const GaussianCloud cloud = load_checkpoint(ckpt);
  const LoadedScene scene = load_scene(cli.scene);
  const auto views = select_views(scene.manifest, cli.views);
  const MetricReport report = evaluate_checkpoint(cloud, scene, views, cli.threads);

  std::cout << report_to_table(report);
  if (!cli.out.empty()) {
    fs::create_directories(cli.out);
    write_text(fs::path(cli.out) / "report.csv", report_to_csv(report));
    write_text(fs::path(cli.out) / "report.txt", report_to_table(report));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ablate

struct AblateCli {
  std::string scene;
  std::string out;
  ConfigCli config;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

int cmd_ablate(const AblateCli& cli) {
  const fs::path out_dir = resolve_run_dir(cli.out);
  fs::create_directories(out_dir);
  const LoadedScene scene = load_scene(cli.scene);

  struct Row {
    std::string mode;
    std::uint64_t seed;
    double psnr;
    double ssim;
  };
  std::vector<Row> rows;
  std::map<std::uint64_t, std::uint64_t> digest_by_seed;

  for (const char* mode : kModeNames) {
    for (const std::uint64_t seed : cli.seeds) {
      RunConfig config = build_run_config(cli.config);
      apply_mode(config, mode);
      config.train.seed = seed;

      const fs::path run_dir =
          out_dir / (std::string(mode) + "_seed" + std::to_string(seed));
      fs::create_directories(run_dir);
      write_text(run_dir / "config.json", run_config_to_json(config));
      write_text(run_dir / "version.txt", std::string(kVersion) + "\n");

      std::ofstream events(run_dir / "events.log");
      TrainCallbacks callbacks;
      callbacks.on_event = [&](const std::string& line) { events << line << "\n"; };

      const TrainResult result = train(scene, config.train, nullptr, callbacks);
      // Every mode must start from the identical cloud for its seed.
      auto [it, inserted] = digest_by_seed.emplace(seed, result.init_digest);
      if (!inserted && it->second != result.init_digest) {
        throw std::runtime_error("ablate: initial cloud digest mismatch for seed " +
                                 std::to_string(seed));
      }
      write_text(run_dir / "init_digest.txt", std::to_string(result.init_digest) + "\n");

      std::ofstream metrics(run_dir / "metrics.csv");
      metrics << metrics_csv_header() << "\n";
      for (const MetricsRow& row : result.history) metrics << metrics_row_to_csv(row) << "\n";
      save_checkpoint(result.cloud, (run_dir / "final.ckpt").string());

      const MetricReport report = evaluate_checkpoint(
          result.cloud, scene, test_view_indices(scene.manifest.views.size()),
          config.train.threads);
      rows.push_back({mode, seed, report.mean_psnr, report.mean_ssim});
      std::cerr << "ablate " << mode << " seed " << seed << " test psnr " << report.mean_psnr
                << "\n";
    }
  }

  std::ostringstream table;
  table << "mode,seed,psnr,ssim\n";
  table.precision(10);
  for (const Row& r : rows) {
    table << r.mode << "," << r.seed << "," << r.psnr << "," << r.ssim << "\n";
  }
  std::ostringstream pretty;
  pretty << "mode            mean_psnr   mean_ssim\n";
  for (const char* mode : kModeNames) {
    double sp = 0, ss = 0;
    int n = 0;
    for (const Row& r : rows) {
      if (r.mode == mode) {
        sp += r.psnr;
        ss += r.ssim;
        ++n;
      }
    }
    char line[96];
    std::snprintf(line, sizeof(line), "%-15s %9.4f %11.6f\n", mode, sp / n, ss / n);
    pretty << line;
  }
  write_text(out_dir / "table.csv", table.str());
  write_text(out_dir / "table.txt", pretty.str());
  std::cout << pretty.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CPU 3D Gaussian splatting trainer with structural attention losses"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SynthCli synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic ground-truth scene");
  synth_cmd->add_option("--out", synth.out, "scene directory")->required();
  synth_cmd->add_option("--gaussians", synth.spec.n_gaussians);
  synth_cmd->add_option("--cameras", synth.spec.n_cameras);
  synth_cmd->add_option("--resolution", synth.spec.resolution);
  synth_cmd->add_option("--seed", synth.spec.seed);
  synth_cmd->add_option("--rig", synth.rig, "orbit or grid");
  synth_cmd->add_option("--scale-lo", synth.spec.scale_frac_lo);
  synth_cmd->add_option("--scale-hi", synth.spec.scale_frac_hi);
  synth_cmd->add_option("--background", synth.background)->expected(3);
  synth_cmd->add_option("--threads", synth.spec.threads);

  TrainCli train_cli;
  CLI::App* train_cmd = app.add_subcommand("train", "optimize a cloud against a scene");
  train_cmd->add_option("--scene", train_cli.scene, "scene directory")->required();
  train_cmd->add_option("--run", train_cli.run, "output run directory")->required();
  train_cmd->add_option("--resume", train_cli.resume_state, "train state file to resume from");
  train_cmd->add_flag("--debug-dumps", train_cli.debug_dumps,
                      "write edge/weight/transmittance maps at checkpoints");
  add_config_options(train_cmd, train_cli.config);

  RenderCli render_cli;
  CLI::App* render_cmd = app.add_subcommand("render", "render checkpoint views to images");
  render_cmd->add_option("--checkpoint", render_cli.checkpoint)->required();
  render_cmd->add_option("--scene", render_cli.scene, "scene directory")->required();
  render_cmd->add_option("--out", render_cli.out, "output directory")->required();
  render_cmd->add_option("--views", render_cli.views, "test, train, all or camera ids");
  render_cmd->add_option("--threads", render_cli.threads);
  render_cmd->add_flag("--dump-transmittance", render_cli.dump_transmittance);

  EvalCli eval_cli;
  CLI::App* eval_cmd = app.add_subcommand("eval", "compute PSNR/SSIM against ground truth");
  eval_cmd->add_option("--checkpoint", eval_cli.checkpoint);
  eval_cmd->add_option("--run", eval_cli.run, "run directory holding final.ckpt");
  eval_cmd->add_option("--scene", eval_cli.scene, "scene directory")->required();
  eval_cmd->add_option("--out", eval_cli.out, "directory for report files");
  eval_cmd->add_option("--views", eval_cli.views);
  eval_cmd->add_option("--threads", eval_cli.threads);

  AblateCli ablate_cli;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "run the four-mode ladder with shared seeds");
  ablate_cmd->add_option("--scene", ablate_cli.scene)->required();
  ablate_cmd->add_option("--out", ablate_cli.out, "output directory")->required();
  ablate_cmd->add_option("--seeds", ablate_cli.seeds);
  add_config_options(ablate_cmd, ablate_cli.config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (train_cmd->parsed()) return cmd_train(train_cli);
    if (render_cmd->parsed()) return cmd_render(render_cli);
    if (eval_cmd->parsed()) return cmd_eval(eval_cli);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate_cli);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

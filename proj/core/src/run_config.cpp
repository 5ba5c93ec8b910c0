// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/run_config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

namespace attnsplat {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw std::runtime_error("config: unknown key '" + where + it.key() + "'");
    }
  }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) obj.at(key).get_to(out);
}

DensifyMode densify_mode_from_string(const std::string& s) {
  if (s == "baseline") return DensifyMode::kBaseline;
  if (s == "opacity_weighted") return DensifyMode::kOpacityWeighted;
  throw std::runtime_error("config: densify.mode must be 'baseline' or 'opacity_weighted'");
}

TViewSource tview_from_string(const std::string& s) {
  if (s == "blend_weight") return TViewSource::kBlendWeight;
  if (s == "transmittance") return TViewSource::kTransmittance;
  throw std::runtime_error("config: densify.tview must be 'blend_weight' or 'transmittance'");
}

}  // namespace

void apply_mode(RunConfig& config, const std::string& mode) {
  config.mode = mode;
  if (mode == "baseline") {
    config.train.mode = TrainMode::kBaseline;
    config.train.densify.mode = DensifyMode::kBaseline;
  } else if (mode == "geo") {
    config.train.mode = TrainMode::kGeo;
    config.train.densify.mode = DensifyMode::kBaseline;
  } else if (mode == "geo+opacity") {
    config.train.mode = TrainMode::kGeo;
    config.train.densify.mode = DensifyMode::kOpacityWeighted;
  } else if (mode == "full") {
    config.train.mode = TrainMode::kFull;
    config.train.densify.mode = DensifyMode::kOpacityWeighted;
  } else {
    throw std::runtime_error("config: unknown mode '" + mode +
                             "' (expected baseline, geo, geo+opacity or full)");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::runtime_error("config: top level must be an object");

  reject_unknown(root, {"mode", "train", "lr", "adam", "schedule", "edge", "densify"}, "");

  RunConfig cfg;
  if (root.contains("mode")) apply_mode(cfg, root.at("mode").get<std::string>());

  if (root.contains("train")) {
    const json& t = root.at("train");
    reject_unknown(t,
                   {"iters", "seed", "threads", "eval_interval", "checkpoint_iters",
                    "sh_degree_interval", "init_count", "init_variance_scale", "init_opacity",
                    "dssim", "dssim_lambda"},
                   "train.");
    get_to(t, "iters", cfg.train.total_iters);
    get_to(t, "seed", cfg.train.seed);
    get_to(t, "threads", cfg.train.threads);
    get_to(t, "eval_interval", cfg.train.eval_interval);
    get_to(t, "checkpoint_iters", cfg.train.checkpoint_iters);
    get_to(t, "sh_degree_interval", cfg.train.sh_degree_interval);
    get_to(t, "init_count", cfg.train.init_count);
    get_to(t, "init_variance_scale", cfg.train.init_variance_scale);
    get_to(t, "init_opacity", cfg.train.init_opacity);
    get_to(t, "dssim", cfg.train.dssim_in_baseline);
    get_to(t, "dssim_lambda", cfg.train.dssim_lambda);
  }
  if (root.contains("lr")) {
    const json& l = root.at("lr");
    reject_unknown(l,
                   {"position_init", "position_final", "sh", "sh_rest_divisor", "opacity",
                    "scale", "rotation"},
                   "lr.");
    get_to(l, "position_init", cfg.train.lr.position_init);
    get_to(l, "position_final", cfg.train.lr.position_final);
    get_to(l, "sh", cfg.train.lr.sh);
    get_to(l, "sh_rest_divisor", cfg.train.lr.sh_rest_divisor);
    get_to(l, "opacity", cfg.train.lr.opacity);
    get_to(l, "scale", cfg.train.lr.scale);
    get_to(l, "rotation", cfg.train.lr.rotation);
  }
  if (root.contains("adam")) {
    const json& a = root.at("adam");
    reject_unknown(a, {"beta1", "beta2", "eps"}, "adam.");
    get_to(a, "beta1", cfg.train.adam.beta1);
    get_to(a, "beta2", cfg.train.adam.beta2);
    get_to(a, "eps", cfg.train.adam.eps);
  }
  if (root.contains("schedule")) {
    const json& s = root.at("schedule");
    reject_unknown(s, {"s", "m"}, "schedule.");
    get_to(s, "s", cfg.train.schedule.steepness);
    get_to(s, "m", cfg.train.schedule.decay_node);
  }
  if (root.contains("edge")) {
    const json& e = root.at("edge");
    reject_unknown(e, {"radius", "blur_sigma"}, "edge.");
    get_to(e, "radius", cfg.train.edge.enhance_radius);
    get_to(e, "blur_sigma", cfg.train.edge.blur_sigma);
  }
  if (root.contains("densify")) {
    const json& d = root.at("densify");
    reject_unknown(d,
                   {"mode", "tau_pos", "interval", "start", "stop", "opacity_reset_interval",
                    "prune_opacity", "split_scale_fraction", "prune_scale_fraction", "tview"},
                   "densify.");
    if (d.contains("mode")) {
      cfg.train.densify.mode = densify_mode_from_string(d.at("mode").get<std::string>());
    }
    get_to(d, "tau_pos", cfg.train.densify.tau_pos);
    get_to(d, "interval", cfg.train.densify.interval);
    get_to(d, "start", cfg.train.densify.start_iter);
    get_to(d, "stop", cfg.train.densify.stop_iter);
    get_to(d, "opacity_reset_interval", cfg.train.densify.opacity_reset_interval);
    get_to(d, "prune_opacity", cfg.train.densify.prune_opacity_threshold);
    get_to(d, "split_scale_fraction", cfg.train.split_scale_fraction);
    get_to(d, "prune_scale_fraction", cfg.train.prune_scale_fraction);
    if (d.contains("tview")) {
      cfg.train.tview_source = tview_from_string(d.at("tview").get<std::string>());
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& config) {
  const TrainConfig& t = config.train;
  json root;
  root["mode"] = config.mode;
  root["train"] = {{"iters", t.total_iters},
                   {"seed", t.seed},
                   {"threads", t.threads},
                   {"eval_interval", t.eval_interval},
                   {"checkpoint_iters", t.checkpoint_iters},
                   {"sh_degree_interval", t.sh_degree_interval},
                   {"init_count", t.init_count},
                   {"init_variance_scale", t.init_variance_scale},
                   {"init_opacity", t.init_opacity},
                   {"dssim", t.dssim_in_baseline},
                   {"dssim_lambda", t.dssim_lambda}};
  root["lr"] = {{"position_init", t.lr.position_init},
                {"position_final", t.lr.position_final},
                {"sh", t.lr.sh},
                {"sh_rest_divisor", t.lr.sh_rest_divisor},
                {"opacity", t.lr.opacity},
                {"scale", t.lr.scale},
                {"rotation", t.lr.rotation}};
  root["adam"] = {{"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"eps", t.adam.eps}};
  root["schedule"] = {{"s", t.schedule.steepness}, {"m", t.schedule.decay_node}};
  root["edge"] = {{"radius", t.edge.enhance_radius}, {"blur_sigma", t.edge.blur_sigma}};
  root["densify"] = {
      {"mode", t.densify.mode == DensifyMode::kBaseline ? "baseline" : "opacity_weighted"},
      {"tau_pos", t.densify.tau_pos},
      {"interval", t.densify.interval},
      {"start", t.densify.start_iter},
      {"stop", t.densify.stop_iter},
      {"opacity_reset_interval", t.densify.opacity_reset_interval},
      {"prune_opacity", t.densify.prune_opacity_threshold},
      {"split_scale_fraction", t.split_scale_fraction},
      {"prune_scale_fraction", t.prune_scale_fraction},
      {"tview", t.tview_source == TViewSource::kBlendWeight ? "blend_weight" : "transmittance"}};
  return root.dump(2) + "\n";
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/train.hpp"

#include <string>

namespace attnsplat {

/// Mode labels of the ablation ladder, in quality order.
inline constexpr const char* kModeNames[4] = {"baseline", "geo", "geo+opacity", "full"};

/// A complete, resolved run configuration: the ablation mode plus every
/// trainer knob. JSON round-trips strictly (unknown keys are rejected)
/// and the echoed form is byte-stable.
struct RunConfig {
  std::string mode = "full";
  TrainConfig train;
};

/// Applies a ladder mode: selects the loss terms and the densification
/// criterion. Explicit densify.mode keys parsed later still win.
void apply_mode(RunConfig& config, const std::string& mode);

/// Strict parse; throws std::runtime_error naming any unknown key or
/// malformed value.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Serializes every effective field (sorted keys, 2-space indent).
std::string run_config_to_json(const RunConfig& config);

}  // namespace attnsplat

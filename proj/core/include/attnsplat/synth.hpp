// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/camera.hpp"
#include "attnsplat/gaussian.hpp"
#include "attnsplat/image.hpp"
#include "attnsplat/init.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace attnsplat {

struct SceneView {
  std::string name;
  std::string image_path; // relative to the scene directory
  Camera camera;
};

struct SceneManifest {
  std::vector<SceneView> views;
  SceneExtent extent;
  Vec3 background = Vec3::Zero();
  int image_maxval = 65535;
  std::string reference_checkpoint; // optional, relative path
  std::string directory;            // where the manifest was loaded from / written to
};

enum class RigKind { kOrbit, kGrid };

struct SynthSpec {
  int n_gaussians = 50;
  RigKind rig = RigKind::kOrbit;
  int n_cameras = 24;
  int resolution = 128;
  std::uint64_t seed = 1;
  Vec3 background = Vec3::Zero();
  double scale_frac_lo = 0.015; // Gaussian sigma range as a fraction of
  double scale_frac_hi = 0.06;  // the extent diagonal
  int threads = 0;
};

/// Seeded ground-truth scene: a clustered random cloud, a camera rig
/// around it, rendered images, the manifest, and the generating cloud as
/// reference.ckpt. Byte-identical for identical spec and seed.
SceneManifest generate_scene(const SynthSpec& spec, const std::string& directory);

struct LoadedScene {
  SceneManifest manifest;
  std::vector<ImageBuffer> images; // aligned with manifest.views
};

/// Parses and validates a scene directory; all referenced images are
/// loaded and range-checked. Errors name the offending path.
LoadedScene load_scene(const std::string& directory);

void save_manifest(const SceneManifest& manifest, const std::string& path);
SceneManifest load_manifest(const std::string& path);

/// Held-out protocol: every 8th view (0, 8, 16, ...) is a test view.
std::vector<std::size_t> test_view_indices(std::size_t n_views);
std::vector<std::size_t> train_view_indices(std::size_t n_views);

}  // namespace attnsplat

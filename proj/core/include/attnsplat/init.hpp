// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"

#include <cstdint>

namespace attnsplat {

struct SceneExtent {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 size() const { return hi - lo; }
  double diagonal() const { return size().norm(); }
};

/// Sparse-large-variance random initialization: few Gaussians whose
/// per-axis sigma scales with extent_diagonal / count^(1/3), biasing the
/// early optimization toward low-frequency structure.
struct SLVInit {
  int count = 100;
  SceneExtent extent;
  double variance_scale = 1.0;
  double opacity = 0.1;
};

GaussianCloud slv_initialize(const SLVInit& init, std::uint64_t seed);

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/camera.hpp"
#include "attnsplat/gaussian.hpp"
#include "attnsplat/image.hpp"
#include "attnsplat/sh.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace attnsplat {

/// Screen-space footprint of one Gaussian after EWA projection.
struct Projected2D {
  Vec2 mean2d = Vec2::Zero();   // pixels
  Vec2 ndc_mean = Vec2::Zero(); // [-1, 1]
  Mat2 cov2d = Mat2::Identity(); // pixels^2, diagonal-regularized
  double depth = 0.0;            // camera-space z
  Vec3 color = Vec3::Zero();     // SH-evaluated rgb for this view
  double alpha0 = 0.0;           // activated opacity
};

/// Per-render byproducts needed by the densification criteria.
struct RenderAux {
  Plane final_transmittance;                 // per-pixel T after compositing
  std::vector<double> blend_weight_sum;      // per Gaussian: sum over pixels of alpha * T
  std::vector<double> transmittance_sum;     // per Gaussian: sum over pixels of T at composite time
  std::vector<std::uint32_t> pixel_hit_count;
  std::vector<Vec2> ndc_grad;                // filled by rasterize_backward
  std::vector<std::uint8_t> visible;         // hit at least one pixel this view
  int skipped_singular = 0;

  std::size_t size() const { return blend_weight_sum.size(); }
};

/// Depth-ordered per-tile work lists. Indices refer to the visible-splat
/// array internal to a render call; depths are non-decreasing within a
/// tile, with the Gaussian index as a deterministic tie-break.
struct SortedSplatList {
  int tile_size = 16;
  int tiles_x = 0;
  int tiles_y = 0;
  std::vector<std::vector<std::uint32_t>> per_tile;
};

/// Gradients with respect to every raw Gaussian parameter.
struct ParamGrads {
  std::vector<Vec3> position;
  std::vector<Vec3> log_scale;
  std::vector<Vec4> rotation;
  std::vector<double> opacity_logit;
  std::vector<ShCoeffs> sh;

  void resize_zero(std::size_t n);
  std::size_t size() const { return position.size(); }
};

struct RenderOptions {
  Vec3 background = Vec3::Zero();
  int tile_size = 16;
  int threads = 1; // 0 = hardware concurrency; any value renders bit-identically
};

/// EWA projection of one activated Gaussian. Returns nullopt when culled
/// (depth <= near, or the mean lands beyond 1.3x the image in NDC).
std::optional<Projected2D> project(const ActivatedGaussian& g, const Camera& camera,
                                   int sh_degree);

/// Front-to-back alpha compositing of the cloud into an image.
/// Deterministic for fixed inputs regardless of the thread count.
ImageBuffer rasterize_forward(const GaussianCloud& cloud, const Camera& camera,
                              RenderAux& aux, const RenderOptions& opts = {});

/// Analytic backward pass. Requires `aux` from a forward pass over the
/// same cloud and camera; fills aux.ndc_grad and returns parameter
/// gradients (zero for culled Gaussians).
ParamGrads rasterize_backward(const GaussianCloud& cloud, const Camera& camera,
                              RenderAux& aux, const ImageBuffer& dL_dimage,
                              const RenderOptions& opts = {});

}  // namespace attnsplat

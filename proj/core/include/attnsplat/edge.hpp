// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/image.hpp"

namespace attnsplat {

/// Non-negative edge-strength field produced by the thinned gradient pipeline.
using EdgeMap = Plane;

/// Max-normalized attention weights; single-channel for the geometric
/// pipeline (WeightMap) and three-channel for the appearance pipeline.
using WeightMap = Plane;

struct EdgeOptions {
  int enhance_radius = 2;    // box dilation radius applied to the edge map
  double blur_sigma = 1.4;   // 5x5 Gaussian pre-blur before the Sobel pass
};

/// Rec.601 luminance.
Plane to_gray(const ImageBuffer& img);

/// 5x5 Gaussian blur, zero-padded borders.
Plane gaussian_blur5(const Plane& img, double sigma);

/// 3x3 Sobel gradients. Magnitude is sqrt(gx^2+gy^2); direction is
/// atan2(gy, gx). Throws for images smaller than 3x3.
void gradient_magnitude(const Plane& gray, Plane& magnitude, Plane& direction);

/// Keeps local maxima of the magnitude along the direction quantized to
/// {0, 45, 90, 135} degrees; ties kept on both sides (>= comparison).
/// No hysteresis thresholding is applied.
EdgeMap non_max_suppression(const Plane& magnitude, const Plane& direction);

/// Normalized (2r+1)^2 box convolution, zero-padded; r = 0 is the identity.
EdgeMap edge_enhance(const EdgeMap& edges, int kernel_radius);

/// Full pipeline: gray -> blur -> Sobel -> NMS -> box enhancement.
EdgeMap enhanced_edges(const ImageBuffer& img, const EdgeOptions& opts);

/// |E_gt - E_render| / max(...); identically zero when the maximum is zero.
WeightMap geometric_weights(const ImageBuffer& gt, const ImageBuffer& render,
                            const EdgeOptions& opts);

/// Per-channel |gt - render| normalized by the single global maximum over
/// all positions and channels.
ImageBuffer appearance_weights(const ImageBuffer& gt, const ImageBuffer& render);

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/camera.hpp"
#include "attnsplat/gaussian.hpp"
#include "attnsplat/image.hpp"
#include "attnsplat/render.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace attnsplat::testing {

/// Brute-force per-pixel compositing oracle. Re-derives the rasterizer's
/// documented semantics directly: a splat is evaluated at every pixel of
/// every 16x16 tile its footprint box (3.5 sigma + 1 px, wide enough that
/// excluded pixels always fall under the alpha threshold) touches, splats
/// composite globally front-to-back by (depth, index), alpha is capped at
/// 0.99, contributions below 1/255 are skipped and accumulation stops when
/// transmittance would drop under 1e-4.
struct NaiveRender {
  ImageBuffer image;
  Plane final_transmittance;
  std::vector<double> blend_weight_sum;
  // contributions[pixel] = list of (gaussian index, alpha, T before splat)
  std::vector<std::vector<std::array<double, 3>>> contributions;
};

inline NaiveRender naive_render(const GaussianCloud& cloud, const Camera& cam,
                                const Vec3& background) {
  struct Splat {
    std::size_t index;
    Projected2D proj;
    Mat2 conic;
    int tx0, tx1, ty0, ty1; // inclusive tile range
  };
  constexpr int kTile = 16;

  std::vector<Splat> splats;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto proj = project(activate(cloud.gaussians[i], i), cam, cloud.active_sh_degree);
    if (!proj) continue;
    Splat s;
    s.index = i;
    s.proj = *proj;
    s.conic = proj->cov2d.inverse();
    const double mid = 0.5 * (proj->cov2d(0, 0) + proj->cov2d(1, 1));
    const double lmax = mid + std::sqrt(std::max(mid * mid - proj->cov2d.determinant(), 0.0));
    const double radius = std::ceil(3.5 * std::sqrt(lmax)) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(proj->mean2d.x() - radius)));
    const int x1 = std::min(cam.width, static_cast<int>(std::ceil(proj->mean2d.x() + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(proj->mean2d.y() - radius)));
    const int y1 = std::min(cam.height, static_cast<int>(std::ceil(proj->mean2d.y() + radius)));
    if (x1 <= x0 || y1 <= y0) continue;
    s.tx0 = x0 / kTile;
    s.tx1 = (x1 - 1) / kTile;
    s.ty0 = y0 / kTile;
    s.ty1 = (y1 - 1) / kTile;
    splats.push_back(s);
  }
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
    if (a.proj.depth != b.proj.depth) return a.proj.depth < b.proj.depth;
    return a.index < b.index;
  });

  NaiveRender out;
  out.image = ImageBuffer(cam.width, cam.height);
  out.final_transmittance = Plane(cam.width, cam.height, 1.0);
  out.blend_weight_sum.assign(cloud.size(), 0.0);
  out.contributions.resize(static_cast<std::size_t>(cam.width) * cam.height);

  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const int tx = x / kTile, ty = y / kTile;
      const double px = x + 0.5, py = y + 0.5;
      double t = 1.0;
      Vec3 c = Vec3::Zero();
      auto& pixel_contribs = out.contributions[static_cast<std::size_t>(y) * cam.width + x];
      for (const Splat& s : splats) {
        if (tx < s.tx0 || tx > s.tx1 || ty < s.ty0 || ty > s.ty1) continue;
        const Vec2 d(px - s.proj.mean2d.x(), py - s.proj.mean2d.y());
        const double power = -0.5 * d.dot(s.conic * d);
        if (power > 0.0) continue;
        const double alpha = std::min(0.99, s.proj.alpha0 * std::exp(power));
        if (alpha < 1.0 / 255.0) continue;
        if (t * (1.0 - alpha) < 1e-4) break;
        pixel_contribs.push_back({static_cast<double>(s.index), alpha, t});
        c += alpha * t * s.proj.color;
        out.blend_weight_sum[s.index] += alpha * t;
        t *= 1.0 - alpha;
      }
      for (int ch = 0; ch < 3; ++ch) out.image.at(x, y, ch) = c[ch] + t * background[ch];
      out.final_transmittance.at(x, y) = t;
    }
  }
  return out;
}

}  // namespace attnsplat::testing

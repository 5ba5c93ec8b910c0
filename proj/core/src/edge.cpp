// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/edge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace attnsplat {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

double sample_zero_pad(const Plane& p, int x, int y) {
  if (x < 0 || y < 0 || x >= p.width || y >= p.height) return 0.0;
  return p.at(x, y);
}

// Replicated borders keep constant images gradient-free.
double sample_clamped(const Plane& p, int x, int y) {
  x = std::clamp(x, 0, p.width - 1);
  y = std::clamp(y, 0, p.height - 1);
  return p.at(x, y);
}

}  // namespace

Plane to_gray(const ImageBuffer& img) {
  Plane gray(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      gray.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
  return gray;
}

Plane gaussian_blur5(const Plane& img, double sigma) {
  double k[5];
  double sum = 0.0;
  for (int i = -2; i <= 2; ++i) {
    k[i + 2] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + 2];
  }
  for (double& v : k) v /= sum;

  Plane tmp(img.width, img.height), out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * sample_clamped(img, x + i, y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * sample_clamped(tmp, x, y + i);
      out.at(x, y) = acc;
    }
  return out;
}

void gradient_magnitude(const Plane& gray, Plane& magnitude, Plane& direction) {
  if (gray.width < 3 || gray.height < 3) {
    throw std::invalid_argument("gradient_magnitude: image smaller than 3x3");
  }
  magnitude = Plane(gray.width, gray.height);
  direction = Plane(gray.width, gray.height);
  for (int y = 0; y < gray.height; ++y) {
    for (int x = 0; x < gray.width; ++x) {
      const double p00 = sample_clamped(gray, x - 1, y - 1);
      const double p10 = sample_clamped(gray, x, y - 1);
      const double p20 = sample_clamped(gray, x + 1, y - 1);
      const double p01 = sample_clamped(gray, x - 1, y);
      const double p21 = sample_clamped(gray, x + 1, y);
      const double p02 = sample_clamped(gray, x - 1, y + 1);
      const double p12 = sample_clamped(gray, x, y + 1);
      const double p22 = sample_clamped(gray, x + 1, y + 1);
      const double gx = (p20 + 2 * p21 + p22) - (p00 + 2 * p01 + p02);
      const double gy = (p02 + 2 * p12 + p22) - (p00 + 2 * p10 + p20);
      magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
      direction.at(x, y) = std::atan2(gy, gx);
    }
  }
}

EdgeMap non_max_suppression(const Plane& magnitude, const Plane& direction) {
  if (!magnitude.same_shape(direction)) {
    throw std::invalid_argument("non_max_suppression: shape mismatch");
  }
  EdgeMap out(magnitude.width, magnitude.height);
  for (int y = 0; y < magnitude.height; ++y) {
    for (int x = 0; x < magnitude.width; ++x) {
      const double m = magnitude.at(x, y);
      if (m == 0.0) continue;

      // Quantize the gradient direction to one of four axes.
      double angle = direction.at(x, y) * 180.0 / std::numbers::pi;
      if (angle < 0.0) angle += 180.0;
      int dx = 1, dy = 0; // 0 deg: horizontal gradient, compare left/right
      if (angle >= 22.5 && angle < 67.5) {
        dx = 1;
        dy = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        dx = 0;
        dy = 1;
      } else if (angle >= 112.5 && angle < 157.5) {
        dx = -1;
        dy = 1;
      }
      const double a = sample_zero_pad(magnitude, x + dx, y + dy);
      const double b = sample_zero_pad(magnitude, x - dx, y - dy);
      if (m >= a && m >= b) out.at(x, y) = m;
    }
  }
  return out;
}

EdgeMap edge_enhance(const EdgeMap& edges, int kernel_radius) {
  if (kernel_radius < 0) throw std::invalid_argument("edge_enhance: negative radius");
  if (kernel_radius == 0) return edges;
  const int r = kernel_radius;
  const double norm = 1.0 / ((2 * r + 1) * (2 * r + 1));

  // Separable box passes; normalization once at the end.
  Plane tmp(edges.width, edges.height), out(edges.width, edges.height);
  for (int y = 0; y < edges.height; ++y)
    for (int x = 0; x < edges.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += sample_zero_pad(edges, x + i, y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < edges.height; ++y)
    for (int x = 0; x < edges.width; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += sample_zero_pad(tmp, x, y + i);
      out.at(x, y) = acc * norm;
    }
  return out;
}

EdgeMap enhanced_edges(const ImageBuffer& img, const EdgeOptions& opts) {
  Plane magnitude, direction;
  gradient_magnitude(gaussian_blur5(to_gray(img), opts.blur_sigma), magnitude, direction);
  return edge_enhance(non_max_suppression(magnitude, direction), opts.enhance_radius);
}

WeightMap geometric_weights(const ImageBuffer& gt, const ImageBuffer& render,
                            const EdgeOptions& opts) {
  require_same_shape(gt, render, "geometric_weights");
  const EdgeMap e_gt = enhanced_edges(gt, opts);
  const EdgeMap e_render = enhanced_edges(render, opts);

  WeightMap w(gt.width, gt.height);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    w.data[i] = std::abs(e_gt.data[i] - e_render.data[i]);
    max_diff = std::max(max_diff, w.data[i]);
  }
  if (max_diff > 0.0) {
    for (double& v : w.data) v /= max_diff;
  }
  return w;
}

ImageBuffer appearance_weights(const ImageBuffer& gt, const ImageBuffer& render) {
  require_same_shape(gt, render, "appearance_weights");
  ImageBuffer w(gt.width, gt.height);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    w.data[i] = std::abs(gt.data[i] - render.data[i]);
    max_diff = std::max(max_diff, w.data[i]);
  }
  if (max_diff > 0.0) {
    for (double& v : w.data) v /= max_diff;
  }
  return w;
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace attnsplat {

/// Row-major H x W x 3 image of doubles. Ground-truth images live in [0,1];
/// renders are only clamped at output boundaries, never inside the loss path.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> data; // size = width * height * 3

  ImageBuffer() = default;
  ImageBuffer(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, fill) {}

  double& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  double at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  std::size_t count() const { return data.size(); }
  bool same_shape(const ImageBuffer& o) const { return width == o.width && height == o.height; }
};

/// Single-channel plane with the same storage conventions.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool same_shape(const Plane& o) const { return width == o.width && height == o.height; }
};

ImageBuffer clamp01(ImageBuffer img);

/// Snaps values to the uniform grid of an integer pixel format
/// (maxval 255 or 65535). Used when comparing renders against stored
/// ground truth so identical pipelines compare exactly equal.
ImageBuffer quantize(const ImageBuffer& img, int maxval);

/// Binary PPM (P6), maxval 255 or 65535, big-endian sample order per spec.
void save_ppm(const ImageBuffer& img, const std::string& path, int maxval = 65535);
ImageBuffer load_ppm(const std::string& path);

/// Grayscale PGM (P5) dump of a plane, linearly mapped from [lo, hi].
void save_pgm(const Plane& plane, const std::string& path, double lo = 0.0, double hi = 1.0);

}  // namespace attnsplat

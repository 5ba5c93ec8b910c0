// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/camera.hpp"
#include "attnsplat/gaussian.hpp"
#include "attnsplat/image.hpp"
#include "attnsplat/rng.hpp"

#include <cmath>
#include <functional>

namespace attnsplat::testing {

inline bool rel_close(double a, double b, double rtol, double atol) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

inline Vec4 random_unit_quaternion(Rng& rng) {
  Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  while (q.norm() < 1e-9) q = Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  return q / q.norm();
}

/// Small random cloud in front of the camera; opacities kept moderate so
/// compositing thresholds stay away from their switching points.
inline GaussianCloud random_cloud(Rng& rng, int count, int sh_degree = 3) {
  GaussianCloud cloud;
  cloud.active_sh_degree = sh_degree;
  cloud.gaussians.resize(count);
  for (Gaussian3D& g : cloud.gaussians) {
    g.position = Vec3(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.5, 0.7));
    for (int k = 0; k < 3; ++k) g.log_scale[k] = std::log(rng.uniform(0.05, 0.25));
    g.rotation = random_unit_quaternion(rng);
    g.opacity_logit = rng.uniform(-1.5, 1.5);
    g.sh.setZero();
    for (int ch = 0; ch < 3; ++ch) {
      g.sh(0, ch) = rng.uniform(-0.8, 0.8);
      for (int row = 1; row < (sh_degree + 1) * (sh_degree + 1); ++row) {
        g.sh(row, ch) = rng.uniform(-0.1, 0.1);
      }
    }
  }
  return cloud;
}

inline Camera test_camera(int width = 32, int height = 32) {
  return make_look_at_camera(Vec3(0, 0, -3), Vec3(0, 0, 0), Vec3(0, 1, 0),
                             1.1 * width, 1.1 * height, width, height, 0.05, 50.0);
}

inline ImageBuffer random_image(Rng& rng, int width, int height) {
  ImageBuffer img(width, height);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

/// Flat parameter indexing for finite differences: position(0..2),
/// log_scale(3..5), rotation(6..9), opacity_logit(10), sh(11..58).
inline constexpr int kParamsPerGaussian = 59;

inline double get_param(const Gaussian3D& g, int j) {
  if (j < 3) return g.position[j];
  if (j < 6) return g.log_scale[j - 3];
  if (j < 10) return g.rotation[j - 6];
  if (j == 10) return g.opacity_logit;
  const int k = j - 11;
  return g.sh(k / 3, k % 3);
}

inline void set_param(Gaussian3D& g, int j, double v) {
  if (j < 3) {
    g.position[j] = v;
  } else if (j < 6) {
    g.log_scale[j - 3] = v;
  } else if (j < 10) {
    g.rotation[j - 6] = v;
  } else if (j == 10) {
    g.opacity_logit = v;
  } else {
    const int k = j - 11;
    g.sh(k / 3, k % 3) = v;
  }
}

/// Central difference of a scalar functional of the cloud.
inline double central_difference(const GaussianCloud& cloud, std::size_t gaussian, int param,
                                 double h,
                                 const std::function<double(const GaussianCloud&)>& objective) {
  GaussianCloud plus = cloud;
  GaussianCloud minus = cloud;
  set_param(plus.gaussians[gaussian], param, get_param(cloud.gaussians[gaussian], param) + h);
  set_param(minus.gaussians[gaussian], param, get_param(cloud.gaussians[gaussian], param) - h);
  return (objective(plus) - objective(minus)) / (2.0 * h);
}

}  // namespace attnsplat::testing

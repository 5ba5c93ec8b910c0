// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/init.hpp"

#include "attnsplat/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

GaussianCloud slv_initialize(const SLVInit& init, std::uint64_t seed) {
  if (init.count < 1) throw std::invalid_argument("slv_initialize: count must be >= 1");
  if (!(init.variance_scale > 0.0)) {
    throw std::invalid_argument("slv_initialize: variance_scale must be > 0");
  }
  const Vec3 size = init.extent.size();
  if (!(size.minCoeff() > 0.0)) {
    throw std::invalid_argument("slv_initialize: degenerate scene extent");
  }

  const double sigma =
      init.variance_scale * init.extent.diagonal() / std::cbrt(static_cast<double>(init.count));
  const double log_sigma = std::log(sigma);
  const double opacity_logit_init = logit(init.opacity);

  Rng rng(seed);
  GaussianCloud cloud;
  cloud.active_sh_degree = 0;
  cloud.gaussians.resize(init.count);
  for (Gaussian3D& g : cloud.gaussians) {
    for (int k = 0; k < 3; ++k) {
      g.position[k] = rng.uniform(init.extent.lo[k], init.extent.hi[k]);
    }
    g.log_scale = Vec3::Constant(log_sigma);
    g.rotation = Vec4(1, 0, 0, 0);
    g.opacity_logit = opacity_logit_init;
    g.sh.setZero(); // zero DC renders mid-gray through the 0.5 color offset
  }
  return cloud;
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "attnsplat/adam.hpp"
#include "attnsplat/init.hpp"
#include "support/test_utils.hpp"

#include <cmath>

using namespace attnsplat;

namespace {

GaussianCloud one_gaussian_cloud() {
  GaussianCloud cloud;
  cloud.gaussians.emplace_back();
  return cloud;
}

}  // namespace

TEST_CASE("zero gradients with zero moments leave parameters unchanged") {
  Rng rng(91);
  GaussianCloud cloud = testing::random_cloud(rng, 3);
  const GaussianCloud before = cloud;
  ParamGrads grads;
  grads.resize_zero(3);
  AdamState state;
  state.resize_zero(3);
  adam_step(cloud, grads, state, {}, {}, 1, 100);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cloud.gaussians[i].position == before.gaussians[i].position);
    CHECK(cloud.gaussians[i].log_scale == before.gaussians[i].log_scale);
    CHECK(cloud.gaussians[i].opacity_logit == before.gaussians[i].opacity_logit);
    CHECK(cloud.gaussians[i].sh == before.gaussians[i].sh);
  }
}

TEST_CASE("the first step with unit gradient moves by roughly the learning rate") {
  GaussianCloud cloud = one_gaussian_cloud();
  const double before = cloud.gaussians[0].opacity_logit;
  ParamGrads grads;
  grads.resize_zero(1);
  grads.opacity_logit[0] = 1.0;
  AdamState state;
  state.resize_zero(1);
  LearningRates rates;
  rates.opacity = 0.05;
  AdamConfig config;
  adam_step(cloud, grads, state, rates, config, 1, 100);
  const double moved = before - cloud.gaussians[0].opacity_logit;
  CHECK(moved == doctest::Approx(rates.opacity / (1.0 + config.eps)).epsilon(1e-12));
}

TEST_CASE("adam converges on a scalar quadratic within 2000 steps") {
  // Minimize (x - 3)^2 from x = 0 at lr 0.01, via the opacity slot.
  GaussianCloud cloud = one_gaussian_cloud();
  cloud.gaussians[0].opacity_logit = 0.0;
  AdamState state;
  state.resize_zero(1);
  LearningRates rates;
  rates.opacity = 0.01;
  ParamGrads grads;
  grads.resize_zero(1);
  for (int iter = 1; iter <= 2000; ++iter) {
    const double x = cloud.gaussians[0].opacity_logit;
    grads.opacity_logit[0] = 2.0 * (x - 3.0);
    adam_step(cloud, grads, state, rates, {}, iter, 2000);
  }
  CHECK(std::abs(cloud.gaussians[0].opacity_logit - 3.0) < 1e-3);
}

TEST_CASE("non-finite gradients skip the gaussian and report the count") {
  Rng rng(92);
  GaussianCloud cloud = testing::random_cloud(rng, 2);
  const GaussianCloud before = cloud;
  ParamGrads grads;
  grads.resize_zero(2);
  grads.position[0] = Vec3(1, 1, 1);
  grads.position[1] = Vec3(std::numeric_limits<double>::infinity(), 0, 0);
  AdamState state;
  state.resize_zero(2);
  const int skipped = adam_step(cloud, grads, state, {}, {}, 1, 100);
  CHECK(skipped == 1);
  CHECK(cloud.gaussians[1].position == before.gaussians[1].position);
  CHECK(cloud.gaussians[0].position != before.gaussians[0].position);
}

TEST_CASE("quaternions are unit norm after every step") {
  Rng rng(93);
  GaussianCloud cloud = testing::random_cloud(rng, 4);
  AdamState state;
  state.resize_zero(4);
  ParamGrads grads;
  grads.resize_zero(4);
  for (int iter = 1; iter <= 5; ++iter) {
    for (std::size_t i = 0; i < 4; ++i) {
      grads.rotation[i] = Vec4(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    }
    adam_step(cloud, grads, state, {}, {}, iter, 5);
    for (const Gaussian3D& g : cloud.gaussians) {
      CHECK(std::abs(g.rotation.norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("position learning rate decays exponentially to its final value") {
  LearningRates rates;
  rates.position_init = 1.6e-4;
  rates.position_final = 1.6e-6;
  CHECK(position_lr_at(rates, 0, 1000) == doctest::Approx(1.6e-4));
  CHECK(position_lr_at(rates, 1000, 1000) == doctest::Approx(1.6e-6));
  CHECK(position_lr_at(rates, 500, 1000) ==
        doctest::Approx(std::sqrt(1.6e-4 * 1.6e-6)).epsilon(1e-12));
  // Monotone decreasing.
  double prev = 1.0;
  for (int i = 0; i <= 1000; i += 100) {
    const double lr = position_lr_at(rates, i, 1000);
    CHECK(lr < prev);
    prev = lr;
  }
}

TEST_CASE("moment remapping carries state for survivors and zeroes newcomers") {
  AdamState state;
  state.resize_zero(3);
  state.m.position[0] = Vec3(1, 2, 3);
  state.m.position[2] = Vec3(4, 5, 6);
  state.v.opacity_logit[2] = 0.7;

  state.remap({2, -1, 0});
  REQUIRE(state.size() == 3);
  CHECK(state.m.position[0] == Vec3(4, 5, 6));
  CHECK(state.v.opacity_logit[0] == 0.7);
  CHECK(state.m.position[1] == Vec3::Zero());
  CHECK(state.m.position[2] == Vec3(1, 2, 3));
}

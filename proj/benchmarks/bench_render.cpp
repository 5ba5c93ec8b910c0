// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/render.hpp"
#include "attnsplat/rng.hpp"

#include <benchmark/benchmark.h>

using namespace attnsplat;

namespace {

GaussianCloud bench_cloud(int count) {
  Rng rng(1234);
  GaussianCloud cloud;
  cloud.active_sh_degree = 3;
  cloud.gaussians.resize(count);
  for (Gaussian3D& g : cloud.gaussians) {
    g.position = Vec3(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8));
    for (int k = 0; k < 3; ++k) g.log_scale[k] = std::log(rng.uniform(0.02, 0.12));
    Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    g.rotation = q / q.norm();
    g.opacity_logit = rng.uniform(-1.0, 2.0);
    for (int i = 0; i < kShCoeffCount; ++i)
      for (int c = 0; c < 3; ++c) g.sh(i, c) = rng.uniform(-0.3, 0.3);
  }
  return cloud;
}

Camera bench_camera(int res) {
  return make_look_at_camera(Vec3(0, 0.4, -2.6), Vec3::Zero(), Vec3(0, 1, 0), 1.1 * res,
                             1.1 * res, res, res, 0.05, 50.0);
}

void BM_RasterizeForward(benchmark::State& state) {
  const GaussianCloud cloud = bench_cloud(static_cast<int>(state.range(0)));
  const Camera cam = bench_camera(static_cast<int>(state.range(1)));
  RenderOptions opts;
  opts.threads = 1;
  for (auto _ : state) {
    RenderAux aux;
    ImageBuffer img = rasterize_forward(cloud, cam, aux, opts);
    benchmark::DoNotOptimize(img.data.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RasterizeForward)->Args({256, 128})->Args({1024, 128})->Args({4096, 128});

void BM_RasterizeBackward(benchmark::State& state) {
  const GaussianCloud cloud = bench_cloud(static_cast<int>(state.range(0)));
  const Camera cam = bench_camera(static_cast<int>(state.range(1)));
  RenderOptions opts;
  opts.threads = 1;
  RenderAux aux;
  const ImageBuffer img = rasterize_forward(cloud, cam, aux, opts);
  ImageBuffer grad(img.width, img.height, 1e-4);
  for (auto _ : state) {
    RenderAux pass_aux = aux;
    ParamGrads grads = rasterize_backward(cloud, cam, pass_aux, grad, opts);
    benchmark::DoNotOptimize(grads.position.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RasterizeBackward)->Args({256, 128})->Args({1024, 128});

}  // namespace

BENCHMARK_MAIN();

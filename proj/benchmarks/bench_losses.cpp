// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/losses.hpp"
#include "attnsplat/metrics.hpp"
#include "attnsplat/rng.hpp"

#include <benchmark/benchmark.h>

using namespace attnsplat;

namespace {

ImageBuffer random_image(int res, std::uint64_t seed) {
  Rng rng(seed);
  ImageBuffer img(res, res);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

void BM_TotalLoss(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const ImageBuffer gt = random_image(res, 1);
  const ImageBuffer render = random_image(res, 2);
  ScheduleParams schedule;
  for (auto _ : state) {
    LossComponents comps;
    LossValueGrad out = total_loss(gt, render, 3500, schedule, {}, comps);
    benchmark::DoNotOptimize(out.grad.data.data());
  }
  state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(BM_TotalLoss)->Arg(128)->Arg(256);

void BM_EdgePipeline(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const ImageBuffer gt = random_image(res, 3);
  const ImageBuffer render = random_image(res, 4);
  for (auto _ : state) {
    WeightMap w = geometric_weights(gt, render, {});
    benchmark::DoNotOptimize(w.data.data());
  }
}
BENCHMARK(BM_EdgePipeline)->Arg(128)->Arg(256);

void BM_Ssim(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const ImageBuffer gt = random_image(res, 5);
  const ImageBuffer render = random_image(res, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ssim(gt, render));
  }
}
BENCHMARK(BM_Ssim)->Arg(128);

}  // namespace

BENCHMARK_MAIN();

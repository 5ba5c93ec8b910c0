// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "attnsplat/densify.hpp"
#include "support/test_utils.hpp"

#include <cmath>

using namespace attnsplat;

namespace {

DensifyConfig test_config(DensifyMode mode, double tau = 0.22, double split_threshold = 0.5) {
  DensifyConfig c;
  c.mode = mode;
  c.tau_pos = tau;
  c.scale_split_threshold = split_threshold;
  return c;
}

// Direct transliteration of the two criteria, kept independent of the
// implementation under test.
double brute_force_criterion(const std::vector<double>& grad_norms,
                             const std::vector<double>& weights, DensifyMode mode) {
  if (grad_norms.empty()) return 0.0;
  if (mode == DensifyMode::kBaseline) {
    double sum = 0.0;
    for (double g : grad_norms) sum += g;
    return sum / static_cast<double>(grad_norms.size());
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < grad_norms.size(); ++k) {
    num += weights[k] * grad_norms[k];
    den += weights[k];
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

TEST_CASE("unrecorded gaussians keep zero statistics") {
  DensifyStats stats(3);
  record_view(stats, 1, Vec2(0.3, 0.4), 2.0);
  CHECK(stats.grad_norm_sum[0] == 0.0);
  CHECK(stats.view_count[0] == 0);
  CHECK(stats.grad_norm_sum[1] == doctest::Approx(0.5));
  CHECK(stats.view_count[1] == 1);
}

TEST_CASE("negative transmittance weights are rejected") {
  DensifyStats stats(1);
  CHECK_THROWS_AS(record_view(stats, 0, Vec2(1, 0), -0.1), std::invalid_argument);
}

TEST_CASE("equal transmittance collapses the weighted criterion to the baseline mean") {
  DensifyStats stats(1);
  record_view(stats, 0, Vec2(0.1, 0.0), 2.5);
  record_view(stats, 0, Vec2(0.3, 0.0), 2.5);
  const double weighted = densify_criterion(stats, 0, DensifyMode::kOpacityWeighted);
  const double baseline = densify_criterion(stats, 0, DensifyMode::kBaseline);
  CHECK(weighted == doctest::Approx(baseline).epsilon(1e-15));
  CHECK(baseline == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("the worked two-view example separates the two criteria at tau 0.22") {
  // Views with transmittance (1, 3) and gradient norms (0.1, 0.3):
  // weighted (1*0.1 + 3*0.3)/4 = 0.25, baseline mean 0.2.
  GaussianCloud cloud;
  cloud.gaussians.emplace_back();
  cloud.gaussians[0].log_scale = Vec3::Constant(std::log(0.1));

  DensifyStats stats(1);
  record_view(stats, 0, Vec2(0.1, 0.0), 1.0);
  record_view(stats, 0, Vec2(0.3, 0.0), 3.0);

  CHECK(densify_criterion(stats, 0, DensifyMode::kOpacityWeighted) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK(densify_criterion(stats, 0, DensifyMode::kBaseline) ==
        doctest::Approx(0.2).epsilon(1e-15));

  const auto weighted =
      densify_decision(stats, cloud, test_config(DensifyMode::kOpacityWeighted));
  const auto baseline = densify_decision(stats, cloud, test_config(DensifyMode::kBaseline));
  CHECK(weighted[0] == DensifyAction::kClone); // scale 0.1 below the split threshold
  CHECK(baseline[0] == DensifyAction::kKeep);
}

TEST_CASE("criterion values below tau keep every gaussian") {
  Rng rng(81);
  GaussianCloud cloud = testing::random_cloud(rng, 6);
  DensifyStats stats(6);
  for (std::size_t i = 0; i < 6; ++i) {
    record_view(stats, i, Vec2(1e-5, 0), rng.uniform(0.1, 2.0));
  }
  const auto actions = densify_decision(stats, cloud, test_config(DensifyMode::kBaseline));
  for (auto a : actions) CHECK(a == DensifyAction::kKeep);
}

TEST_CASE("weighted criterion is invariant to rescaling a gaussian's transmittances") {
  Rng rng(82);
  for (int trial = 0; trial < 20; ++trial) {
    const int views = 1 + static_cast<int>(rng.next() % 4);
    DensifyStats a(1), b(1);
    const double c = rng.uniform(0.1, 10.0);
    for (int k = 0; k < views; ++k) {
      const Vec2 g(rng.uniform(-1, 1), rng.uniform(-1, 1));
      const double t = rng.uniform(0.01, 3.0);
      record_view(a, 0, g, t);
      record_view(b, 0, g, c * t);
    }
    const double va = densify_criterion(a, 0, DensifyMode::kOpacityWeighted);
    const double vb = densify_criterion(b, 0, DensifyMode::kOpacityWeighted);
    CHECK(std::abs(va - vb) < 1e-12 * std::max(1.0, std::abs(va)));
  }
}

TEST_CASE("raising the heaviest view's weight never lowers the weighted criterion") {
  DensifyStats stats(1);
  record_view(stats, 0, Vec2(0.05, 0), 1.0);
  record_view(stats, 0, Vec2(0.5, 0), 2.0); // largest gradient norm
  record_view(stats, 0, Vec2(0.2, 0), 1.5);
  const double before = densify_criterion(stats, 0, DensifyMode::kOpacityWeighted);

  DensifyStats bumped(1);
  record_view(bumped, 0, Vec2(0.05, 0), 1.0);
  record_view(bumped, 0, Vec2(0.5, 0), 3.5);
  record_view(bumped, 0, Vec2(0.2, 0), 1.5);
  CHECK(densify_criterion(bumped, 0, DensifyMode::kOpacityWeighted) >= before);
}

TEST_CASE("decisions agree with a brute-force oracle on random instances") {
  Rng rng(83);
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 1 + static_cast<int>(rng.next() % 5);
    GaussianCloud cloud = testing::random_cloud(rng, n);
    const DensifyMode mode =
        rng.uniform() < 0.5 ? DensifyMode::kBaseline : DensifyMode::kOpacityWeighted;
    const double tau = rng.uniform(0.01, 0.5);
    const double split_threshold = rng.uniform(0.05, 0.4);

    DensifyStats stats(n);
    std::vector<std::vector<double>> norms(n);
    std::vector<std::vector<double>> weights(n);
    for (int i = 0; i < n; ++i) {
      const int views = static_cast<int>(rng.next() % 5); // may stay unseen
      for (int k = 0; k < views; ++k) {
        const Vec2 g(rng.uniform(-1, 1), rng.uniform(-1, 1));
        const double t = rng.uniform(0.0, 2.0);
        record_view(stats, i, g, t);
        norms[i].push_back(g.norm());
        weights[i].push_back(t);
      }
    }

    const auto actions =
        densify_decision(stats, cloud, test_config(mode, tau, split_threshold));
    for (int i = 0; i < n; ++i) {
      const double value = brute_force_criterion(norms[i], weights[i], mode);
      DensifyAction expected = DensifyAction::kKeep;
      if (value > tau) {
        const double max_scale = cloud.gaussians[i].log_scale.array().exp().maxCoeff();
        expected = max_scale > split_threshold ? DensifyAction::kSplit : DensifyAction::kClone;
      }
      CHECK(actions[i] == expected);
    }
  }
}

TEST_CASE("all-keep decisions leave the cloud bit-identical") {
  Rng rng(84);
  const GaussianCloud cloud = testing::random_cloud(rng, 5);
  const std::vector<DensifyAction> keep(5, DensifyAction::kKeep);
  const DensifyResult out = apply_densify(cloud, keep, {}, 0.0, 7);
  REQUIRE(out.cloud.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(out.cloud.gaussians[i].position == cloud.gaussians[i].position);
    CHECK(out.cloud.gaussians[i].sh == cloud.gaussians[i].sh);
    CHECK(out.source_index[i] == static_cast<std::int64_t>(i));
  }
}

TEST_CASE("a split removes the parent and spawns two shrunken children") {
  Rng rng(85);
  GaussianCloud cloud = testing::random_cloud(rng, 4);
  std::vector<DensifyAction> actions(4, DensifyAction::kKeep);
  actions[2] = DensifyAction::kSplit;

  const DensifyResult out = apply_densify(cloud, actions, {}, 0.0, 7);
  CHECK(out.cloud.size() == 5); // 3 kept + 2 children
  CHECK(out.splits == 1);

  const Vec3 parent_scale = cloud.gaussians[2].log_scale.array().exp();
  int children = 0;
  for (std::size_t i = 0; i < out.cloud.size(); ++i) {
    if (out.source_index[i] != -1) continue;
    ++children;
    const Vec3 child_scale = out.cloud.gaussians[i].log_scale.array().exp();
    CHECK((child_scale * 1.6 - parent_scale).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(children == 2);
}

TEST_CASE("cloud size accounting is exact: kept + 2 splits + 2 clones") {
  Rng rng(86);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 6);
    GaussianCloud cloud = testing::random_cloud(rng, n);
    std::vector<DensifyAction> actions(n);
    int keeps = 0, clones = 0, splits = 0;
    for (auto& a : actions) {
      const double u = rng.uniform();
      if (u < 0.5) {
        a = DensifyAction::kKeep;
        ++keeps;
      } else if (u < 0.8) {
        a = DensifyAction::kClone;
        ++clones;
      } else {
        a = DensifyAction::kSplit;
        ++splits;
      }
    }
    const DensifyResult out = apply_densify(cloud, actions, {}, 0.0, trial);
    CHECK(out.cloud.size() == static_cast<std::size_t>(keeps + 2 * clones + 2 * splits));
    CHECK(out.clones == clones);
    CHECK(out.splits == splits);
  }
}

TEST_CASE("splits are byte-identical across runs with a fixed seed") {
  Rng rng(87);
  GaussianCloud cloud = testing::random_cloud(rng, 3);
  std::vector<DensifyAction> actions(3, DensifyAction::kSplit);
  const DensifyResult a = apply_densify(cloud, actions, {}, 0.0, 12345);
  const DensifyResult b = apply_densify(cloud, actions, {}, 0.0, 12345);
  REQUIRE(a.cloud.size() == b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.gaussians[i].position == b.cloud.gaussians[i].position);
  }
  const DensifyResult c = apply_densify(cloud, actions, {}, 0.0, 54321);
  CHECK(a.cloud.gaussians[0].position != c.cloud.gaussians[0].position);
}

TEST_CASE("clones nudge the copy along the negative position gradient") {
  Rng rng(88);
  GaussianCloud cloud = testing::random_cloud(rng, 2);
  std::vector<DensifyAction> actions = {DensifyAction::kClone, DensifyAction::kKeep};
  std::vector<Vec3> grads = {Vec3(1, -2, 0.5), Vec3::Zero()};
  const double lr = 0.01;
  const DensifyResult out = apply_densify(cloud, actions, grads, lr, 7);
  REQUIRE(out.cloud.size() == 3);
  const Vec3 expected = cloud.gaussians[0].position - lr * grads[0];
  CHECK((out.cloud.gaussians[1].position - expected).norm() < 1e-15);
}

TEST_CASE("pruning drops low-opacity gaussians and keeps the rest untouched") {
  Rng rng(89);
  GaussianCloud cloud = testing::random_cloud(rng, 4);
  cloud.gaussians[1].opacity_logit = logit(0.001);
  DensifyConfig config;
  config.prune_opacity_threshold = 0.005;
  config.opacity_reset_interval = 0;

  const PruneResult out = prune_and_reset(cloud, 100, config);
  CHECK(out.cloud.size() == 3);
  CHECK(out.pruned == 1);
  CHECK(out.source_index == std::vector<std::int64_t>{0, 2, 3});

  const PruneResult unchanged = prune_and_reset(out.cloud, 101, config);
  CHECK(unchanged.cloud.size() == 3);
  CHECK(unchanged.pruned == 0);
}

TEST_CASE("opacity reset clamps every activated opacity to at most 0.01") {
  Rng rng(90);
  GaussianCloud cloud = testing::random_cloud(rng, 6);
  DensifyConfig config;
  config.opacity_reset_interval = 3000;
  const PruneResult out = prune_and_reset(cloud, 3000, config);
  CHECK(out.opacity_was_reset);
  for (const Gaussian3D& g : out.cloud.gaussians) {
    CHECK(sigmoid(g.opacity_logit) <= 0.01 + 1e-12);
  }
  // Off-cadence iterations do not reset.
  const PruneResult off = prune_and_reset(cloud, 2999, config);
  CHECK_FALSE(off.opacity_was_reset);
}

TEST_CASE("pruning the whole cloud is a degenerate-run error") {
  GaussianCloud cloud;
  cloud.gaussians.emplace_back();
  cloud.gaussians[0].opacity_logit = logit(0.0001);
  DensifyConfig config;
  CHECK_THROWS_AS(prune_and_reset(cloud, 10, config), std::runtime_error);
}

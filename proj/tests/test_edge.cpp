// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "attnsplat/edge.hpp"
#include "support/test_utils.hpp"

#include <cmath>

using namespace attnsplat;

namespace {

ImageBuffer constant_image(int w, int h, double v) {
  ImageBuffer img(w, h);
  for (double& d : img.data) d = v;
  return img;
}

// Vertical step: left half dark, right half bright.
ImageBuffer step_image(int w, int h, int edge_x) {
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = x < edge_x ? 0.1 : 0.9;
  return img;
}

}  // namespace

TEST_CASE("constant images have zero gradient magnitude") {
  Plane mag, dir;
  gradient_magnitude(to_gray(constant_image(16, 16, 0.4)), mag, dir);
  for (double v : mag.data) CHECK(v == 0.0);
}

TEST_CASE("a vertical step produces a horizontal gradient along the edge") {
  const ImageBuffer img = step_image(16, 16, 8);
  Plane mag, dir;
  gradient_magnitude(to_gray(img), mag, dir);
  // Sobel on a unit step: response 4 * delta on the two columns beside the
  // transition, direction 0 (pure horizontal gradient).
  const double delta = 0.9 - 0.1;
  for (int y = 1; y < 15; ++y) {
    CHECK(mag.at(7, y) == doctest::Approx(4.0 * delta).epsilon(1e-12));
    CHECK(mag.at(8, y) == doctest::Approx(4.0 * delta).epsilon(1e-12));
    CHECK(dir.at(7, y) == doctest::Approx(0.0));
    CHECK(mag.at(3, y) == 0.0);
  }
}

TEST_CASE("gradient magnitude commutes with transposition") {
  Rng rng(51);
  const int n = 12;
  ImageBuffer img(n, n);
  for (double& v : img.data) v = rng.uniform();
  ImageBuffer transposed(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int c = 0; c < 3; ++c) transposed.at(y, x, c) = img.at(x, y, c);

  Plane mag_a, dir_a, mag_b, dir_b;
  gradient_magnitude(to_gray(img), mag_a, dir_a);
  gradient_magnitude(to_gray(transposed), mag_b, dir_b);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) CHECK(mag_a.at(x, y) == doctest::Approx(mag_b.at(y, x)));
}

TEST_CASE("images smaller than 3x3 are rejected") {
  Plane tiny(2, 2);
  Plane mag, dir;
  CHECK_THROWS_AS(gradient_magnitude(tiny, mag, dir), std::invalid_argument);
}

TEST_CASE("non-max suppression keeps a one-pixel ridge unchanged") {
  Plane mag(9, 9, 0.0), dir(9, 9, 0.0);
  for (int y = 0; y < 9; ++y) {
    mag.at(4, y) = 2.0;
    dir.at(4, y) = 0.0; // horizontal gradient: compare left/right neighbors
  }
  const EdgeMap out = non_max_suppression(mag, dir);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) CHECK(out.at(x, y) == (x == 4 ? 2.0 : 0.0));
}

TEST_CASE("non-max suppression thins a 3-pixel ramp profile to at most two per row") {
  // Enumerated neighborhoods of a blurred ramp edge: rising shoulder,
  // two-wide flat top (tie), falling shoulder. Ties are kept on both
  // sides by the >= comparison; shoulders lose to the plateau.
  Plane mag(11, 5, 0.0), dir(11, 5, 0.0);
  for (int y = 0; y < 5; ++y) {
    mag.at(4, y) = 0.6;
    mag.at(5, y) = 1.0;
    mag.at(6, y) = 1.0;
    mag.at(7, y) = 0.6;
  }
  const EdgeMap out = non_max_suppression(mag, dir);
  for (int y = 0; y < 5; ++y) {
    int kept = 0;
    for (int x = 0; x < 11; ++x) kept += out.at(x, y) > 0.0 ? 1 : 0;
    CHECK(kept >= 1);
    CHECK(kept <= 2);
    CHECK(out.at(5, y) == 1.0);
    CHECK(out.at(6, y) == 1.0);
    CHECK(out.at(4, y) == 0.0);
    CHECK(out.at(7, y) == 0.0);
  }
}

TEST_CASE("non-max suppression of a constant field is all zeros") {
  Plane mag(8, 8, 0.0), dir(8, 8, 0.0);
  const EdgeMap out = non_max_suppression(mag, dir);
  for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("edge enhancement with radius zero is the identity") {
  Rng rng(52);
  EdgeMap edges(10, 10);
  for (double& v : edges.data) v = rng.uniform();
  const EdgeMap out = edge_enhance(edges, 0);
  for (std::size_t i = 0; i < edges.data.size(); ++i) CHECK(out.data[i] == edges.data[i]);
}

TEST_CASE("a unit impulse spreads to a 3x3 patch of one ninth") {
  EdgeMap edges(9, 9, 0.0);
  edges.at(4, 4) = 1.0;
  const EdgeMap out = edge_enhance(edges, 1);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      const bool inside = std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1;
      CHECK(out.at(x, y) == doctest::Approx(inside ? 1.0 / 9.0 : 0.0));
    }
}

TEST_CASE("the normalized kernel conserves mass for interior-supported input") {
  EdgeMap edges(15, 15, 0.0);
  edges.at(7, 7) = 2.5;
  edges.at(6, 8) = 0.75;
  for (int r : {1, 2, 3}) {
    const EdgeMap out = edge_enhance(edges, r);
    double sum = 0.0;
    for (double v : out.data) sum += v;
    CHECK(sum == doctest::Approx(3.25).epsilon(1e-12));
  }
}

TEST_CASE("identical images give identically zero geometric weights") {
  const ImageBuffer img = step_image(24, 24, 12);
  const WeightMap w = geometric_weights(img, img, {});
  for (double v : w.data) CHECK(v == 0.0);
}

TEST_CASE("non-identical pairs normalize the peak geometric weight to one") {
  const ImageBuffer gt = step_image(24, 24, 12);
  const ImageBuffer render = constant_image(24, 24, 0.5);
  const WeightMap w = geometric_weights(gt, render, {});
  double max_w = 0.0, min_w = 1e9;
  for (double v : w.data) {
    max_w = std::max(max_w, v);
    min_w = std::min(min_w, v);
  }
  CHECK(max_w == 1.0);
  CHECK(min_w >= 0.0);
}

TEST_CASE("geometric weight support stays within the dilated edge band") {
  const int n = 32;
  const int edge_x = 16;
  const ImageBuffer gt = step_image(n, n, edge_x);
  const ImageBuffer render = constant_image(n, n, 0.5); // edgeless
  EdgeOptions opts;
  opts.enhance_radius = 1;
  const WeightMap w = geometric_weights(gt, render, opts);

  // Brute force the support: the step sits between columns 15 and 16; the
  // pre-blur spreads it 2 px, NMS thins it back, the box adds 1 px.
  const int lo = edge_x - 5, hi = edge_x + 5;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (w.at(x, y) > 0.0) {
        CHECK(x >= lo);
        CHECK(x <= hi);
      }
    }
}

TEST_CASE("appearance weights are channel-separated and peak at one") {
  const int n = 8;
  ImageBuffer gt = constant_image(n, n, 0.5);
  ImageBuffer render = gt;
  render.at(3, 4, 0) = 0.9; // only the red channel differs
  render.at(5, 2, 0) = 0.7;
  const ImageBuffer w = appearance_weights(gt, render);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      CHECK(w.at(x, y, 1) == 0.0);
      CHECK(w.at(x, y, 2) == 0.0);
    }
  CHECK(w.at(3, 4, 0) == 1.0);
  CHECK(w.at(5, 2, 0) == doctest::Approx(0.2 / 0.4));
}

TEST_CASE("identical images give zero appearance weights") {
  Rng rng(53);
  ImageBuffer img(8, 8);
  for (double& v : img.data) v = rng.uniform();
  const ImageBuffer w = appearance_weights(img, img);
  for (double v : w.data) CHECK(v == 0.0);
}

TEST_CASE("weights stay within [0, 1] for arbitrary image pairs") {
  Rng rng(54);
  for (int trial = 0; trial < 10; ++trial) {
    ImageBuffer a(16, 16), b(16, 16);
    for (double& v : a.data) v = rng.uniform();
    for (double& v : b.data) v = rng.uniform();
    const WeightMap geo = geometric_weights(a, b, {});
    const ImageBuffer app = appearance_weights(a, b);
    for (double v : geo.data) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (double v : app.data) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("the edge pipeline is translation-equivariant on interior pixels") {
  // Content sits inside a constant frame so the shift introduces no new
  // edges and the global max normalizer moves with the content.
  Rng rng(55);
  const int n = 48, frame = 12, shift = 3;
  auto framed_random = [&] {
    ImageBuffer img(n, n);
    for (double& v : img.data) v = 0.5;
    for (int y = frame; y < n - frame; ++y)
      for (int x = frame; x < n - frame; ++x)
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = rng.uniform();
    return img;
  };
  const ImageBuffer base = framed_random();
  const ImageBuffer render = framed_random();

  auto shifted = [&](const ImageBuffer& img) {
    ImageBuffer out(n, n);
    for (double& v : out.data) v = 0.5;
    for (int y = 0; y < n - shift; ++y)
      for (int x = 0; x < n - shift; ++x)
        for (int c = 0; c < 3; ++c) out.at(x + shift, y + shift, c) = img.at(x, y, c);
    return out;
  };

  EdgeOptions opts;
  const WeightMap w = geometric_weights(base, render, opts);
  const WeightMap w_shifted = geometric_weights(shifted(base), shifted(render), opts);

  for (int y = frame - 4; y < n - frame + 4 - shift; ++y)
    for (int x = frame - 4; x < n - frame + 4 - shift; ++x) {
      CHECK(w.at(x, y) == doctest::Approx(w_shifted.at(x + shift, y + shift)).epsilon(1e-9));
    }
}

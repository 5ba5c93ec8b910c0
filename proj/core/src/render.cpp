// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace attnsplat {

namespace {

constexpr double kMinAlpha = 1.0 / 255.0;
constexpr double kMinTransmittance = 1e-4;
constexpr double kAlphaCap = 0.99;
constexpr double kCovRegularization = 0.3; // px^2 added to the cov2d diagonal
constexpr double kNdcCullMargin = 1.3;
// Footprint radius in sigmas. At 3.5 sigma alpha is at most
// exp(-6.125) < 1/255 for any opacity, so tile binning can never exclude
// a pixel the alpha threshold would keep: binning stays an optimization,
// not an observable semantic.
constexpr double kFootprintSigma = 3.5;

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Everything the pixel loops and the backward chain need per visible splat.
struct PreparedSplat {
  std::uint32_t gaussian_index = 0;
  Vec2 mean2d = Vec2::Zero();
  Vec2 ndc = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();
  Mat2 conic = Mat2::Zero();
  double depth = 0.0;
  double alpha0 = 0.0;
  Vec3 color = Vec3::Zero();
  Vec3 p_cam = Vec3::Zero();
  Vec3 view_vec = Vec3::Zero(); // mean - camera center, unnormalized
  ShEval sh_eval;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // clipped footprint, for tile binning
};

Mat23 projection_jacobian(const Camera& cam, const Vec3& p_cam) {
  const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
  Mat23 j = Mat23::Zero();
  j(0, 0) = cam.fx / z;
  j(0, 2) = -cam.fx * x / (z * z);
  j(1, 1) = cam.fy / z;
  j(1, 2) = -cam.fy * y / (z * z);
  return j;
}

std::optional<PreparedSplat> prepare_splat(const ActivatedGaussian& act, const Camera& cam,
                                           int sh_degree, bool& singular) {
  singular = false;
  PreparedSplat s;
  s.p_cam = cam.world_to_camera(act.mean);
  if (s.p_cam.z() <= cam.near) return std::nullopt;
  s.depth = s.p_cam.z();
  s.mean2d = cam.camera_to_pixel(s.p_cam);
  s.ndc = cam.pixel_to_ndc(s.mean2d);
  if (std::abs(s.ndc.x()) > kNdcCullMargin || std::abs(s.ndc.y()) > kNdcCullMargin) {
    return std::nullopt;
  }

  const Mat23 m = projection_jacobian(cam, s.p_cam) * cam.rotation;
  s.cov2d = m * act.covariance * m.transpose();
  s.cov2d(0, 0) += kCovRegularization;
  s.cov2d(1, 1) += kCovRegularization;

  const double det = s.cov2d.determinant();
  if (!(det > 0.0) || !s.cov2d.allFinite()) {
    singular = true;
    return std::nullopt;
  }
  s.conic << s.cov2d(1, 1) / det, -s.cov2d(0, 1) / det,
      -s.cov2d(1, 0) / det, s.cov2d(0, 0) / det;

  s.alpha0 = act.opacity;
  s.view_vec = act.mean - cam.center();
  s.sh_eval = evaluate_sh_with_gradient(*act.sh, s.view_vec.normalized(), sh_degree);
  s.color = s.sh_eval.rgb;

  const double mid = 0.5 * (s.cov2d(0, 0) + s.cov2d(1, 1));
  const double lambda_max = mid + std::sqrt(std::max(mid * mid - det, 0.0));
  const double radius = std::ceil(kFootprintSigma * std::sqrt(lambda_max)) + 1.0;
  s.x0 = std::max(0, static_cast<int>(std::floor(s.mean2d.x() - radius)));
  s.x1 = std::min(cam.width, static_cast<int>(std::ceil(s.mean2d.x() + radius)));
  s.y0 = std::max(0, static_cast<int>(std::floor(s.mean2d.y() - radius)));
  s.y1 = std::min(cam.height, static_cast<int>(std::ceil(s.mean2d.y() + radius)));
  if (s.x1 <= s.x0 || s.y1 <= s.y0) return std::nullopt;
  return s;
}

std::vector<PreparedSplat> prepare_splats(const GaussianCloud& cloud, const Camera& cam,
                                          int& skipped_singular) {
  std::vector<PreparedSplat> prepared;
  prepared.reserve(cloud.size());
  skipped_singular = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const ActivatedGaussian act = activate(cloud.gaussians[i], i);
    bool singular = false;
    auto s = prepare_splat(act, cam, cloud.active_sh_degree, singular);
    if (singular) ++skipped_singular;
    if (!s) continue;
    s->gaussian_index = static_cast<std::uint32_t>(i);
    prepared.push_back(std::move(*s));
  }
  return prepared;
}

SortedSplatList build_sorted_list(const std::vector<PreparedSplat>& prepared,
                                  const Camera& cam, int tile_size) {
  SortedSplatList list;
  list.tile_size = tile_size;
  list.tiles_x = (cam.width + tile_size - 1) / tile_size;
  list.tiles_y = (cam.height + tile_size - 1) / tile_size;
  list.per_tile.assign(static_cast<std::size_t>(list.tiles_x) * list.tiles_y, {});

  for (std::uint32_t k = 0; k < prepared.size(); ++k) {
    const PreparedSplat& s = prepared[k];
    const int tx0 = s.x0 / tile_size;
    const int tx1 = (s.x1 - 1) / tile_size;
    const int ty0 = s.y0 / tile_size;
    const int ty1 = (s.y1 - 1) / tile_size;
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        list.per_tile[static_cast<std::size_t>(ty) * list.tiles_x + tx].push_back(k);
  }
  for (auto& tile : list.per_tile) {
    std::sort(tile.begin(), tile.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (prepared[a].depth != prepared[b].depth) return prepared[a].depth < prepared[b].depth;
      return prepared[a].gaussian_index < prepared[b].gaussian_index;
    });
  }
  return list;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void for_each_tile(int n_tiles, int threads, Fn&& fn) {
  threads = std::min(resolve_threads(threads), n_tiles);
  if (threads <= 1) {
    for (int t = 0; t < n_tiles; ++t) fn(t);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int t = next.fetch_add(1); t < n_tiles; t = next.fetch_add(1)) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

struct ForwardTileAccum {
  double blend_weight = 0.0;
  double transmittance = 0.0;
  std::uint32_t hits = 0;
};

struct BackwardTileAccum {
  Vec2 mean2d = Vec2::Zero();
  Mat2 conic = Mat2::Zero();
  double alpha0 = 0.0;
  Vec3 color = Vec3::Zero();
};

struct PixelContribution {
  std::uint32_t entry; // position in the tile list
  double alpha;
  double transmittance; // T before this splat
  bool capped;
};

void init_aux(RenderAux& aux, const GaussianCloud& cloud, const Camera& cam) {
  aux.final_transmittance = Plane(cam.width, cam.height, 1.0);
  aux.blend_weight_sum.assign(cloud.size(), 0.0);
  aux.transmittance_sum.assign(cloud.size(), 0.0);
  aux.pixel_hit_count.assign(cloud.size(), 0);
  aux.ndc_grad.assign(cloud.size(), Vec2::Zero());
  aux.visible.assign(cloud.size(), 0);
  aux.skipped_singular = 0;
}

}  // namespace

void ParamGrads::resize_zero(std::size_t n) {
  position.assign(n, Vec3::Zero());
  log_scale.assign(n, Vec3::Zero());
  rotation.assign(n, Vec4::Zero());
  opacity_logit.assign(n, 0.0);
  sh.assign(n, ShCoeffs::Zero());
}

std::optional<Projected2D> project(const ActivatedGaussian& g, const Camera& camera,
                                   int sh_degree) {
  bool singular = false;
  auto s = prepare_splat(g, camera, sh_degree, singular);
  if (!s) return std::nullopt;
  Projected2D out;
  out.mean2d = s->mean2d;
  out.ndc_mean = s->ndc;
  out.cov2d = s->cov2d;
  out.depth = s->depth;
  out.color = s->color;
  out.alpha0 = s->alpha0;
  return out;
}

ImageBuffer rasterize_forward(const GaussianCloud& cloud, const Camera& camera,
                              RenderAux& aux, const RenderOptions& opts) {
  validate_camera(camera);
  init_aux(aux, cloud, camera);

  const std::vector<PreparedSplat> prepared = prepare_splats(cloud, camera, aux.skipped_singular);
  const SortedSplatList list = build_sorted_list(prepared, camera, opts.tile_size);
  const int n_tiles = list.tiles_x * list.tiles_y;

  ImageBuffer image(camera.width, camera.height);
  std::vector<std::vector<ForwardTileAccum>> tile_accums(n_tiles);

  for_each_tile(n_tiles, opts.threads, [&](int tile) {
    const auto& entries = list.per_tile[tile];
    auto& accum = tile_accums[tile];
    accum.assign(entries.size(), {});

    const int tx = tile % list.tiles_x;
    const int ty = tile / list.tiles_x;
    const int px0 = tx * list.tile_size;
    const int py0 = ty * list.tile_size;
    const int px1 = std::min(camera.width, px0 + list.tile_size);
    const int py1 = std::min(camera.height, py0 + list.tile_size);

    for (int y = py0; y < py1; ++y) {
      for (int x = px0; x < px1; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        double t = 1.0;
        Vec3 c = Vec3::Zero();
        for (std::size_t k = 0; k < entries.size(); ++k) {
          const PreparedSplat& s = prepared[entries[k]];
          const double dx = px - s.mean2d.x();
          const double dy = py - s.mean2d.y();
          const double power = -0.5 * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) -
                               s.conic(0, 1) * dx * dy;
          if (power > 0.0) continue;
          const double alpha = std::min(kAlphaCap, s.alpha0 * std::exp(power));
          if (alpha < kMinAlpha) continue;
          const double t_next = t * (1.0 - alpha);
          if (t_next < kMinTransmittance) break;
          c += alpha * t * s.color;
          accum[k].blend_weight += alpha * t;
          accum[k].transmittance += t;
          accum[k].hits += 1;
          t = t_next;
        }
        for (int ch = 0; ch < 3; ++ch) {
          image.at(x, y, ch) = c[ch] + t * opts.background[ch];
        }
        aux.final_transmittance.at(x, y) = t;
      }
    }
  });

  // Combine per-tile partials in tile order so reductions are deterministic
  // for any thread count.
  for (int tile = 0; tile < n_tiles; ++tile) {
    const auto& entries = list.per_tile[tile];
    const auto& accum = tile_accums[tile];
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::uint32_t gi = prepared[entries[k]].gaussian_index;
      aux.blend_weight_sum[gi] += accum[k].blend_weight;
      aux.transmittance_sum[gi] += accum[k].transmittance;
      aux.pixel_hit_count[gi] += accum[k].hits;
    }
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    aux.visible[i] = aux.pixel_hit_count[i] > 0 ? 1 : 0;
  }
  return image;
}

ParamGrads rasterize_backward(const GaussianCloud& cloud, const Camera& camera,
                              RenderAux& aux, const ImageBuffer& dL_dimage,
                              const RenderOptions& opts) {
  validate_camera(camera);
  if (aux.size() != cloud.size()) {
    throw std::invalid_argument("rasterize_backward: aux does not match the cloud size");
  }
  if (dL_dimage.width != camera.width || dL_dimage.height != camera.height) {
    throw std::invalid_argument("rasterize_backward: gradient image shape mismatch");
  }

  int skipped = 0;
  const std::vector<PreparedSplat> prepared = prepare_splats(cloud, camera, skipped);
  const SortedSplatList list = build_sorted_list(prepared, camera, opts.tile_size);
  const int n_tiles = list.tiles_x * list.tiles_y;

  std::vector<std::vector<BackwardTileAccum>> tile_accums(n_tiles);

  for_each_tile(n_tiles, opts.threads, [&](int tile) {
    const auto& entries = list.per_tile[tile];
    auto& accum = tile_accums[tile];
    accum.assign(entries.size(), {});
    if (entries.empty()) return;

    const int tx = tile % list.tiles_x;
    const int ty = tile / list.tiles_x;
    const int px0 = tx * list.tile_size;
    const int py0 = ty * list.tile_size;
    const int px1 = std::min(camera.width, px0 + list.tile_size);
    const int py1 = std::min(camera.height, py0 + list.tile_size);

    std::vector<PixelContribution> contribs;
    contribs.reserve(entries.size());

    for (int y = py0; y < py1; ++y) {
      for (int x = px0; x < px1; ++x) {
        const double px = x + 0.5, py = y + 0.5;

        // Re-traverse the forward compositing for this pixel.
        contribs.clear();
        double t = 1.0;
        for (std::size_t k = 0; k < entries.size(); ++k) {
          const PreparedSplat& s = prepared[entries[k]];
          const double dx = px - s.mean2d.x();
          const double dy = py - s.mean2d.y();
          const double power = -0.5 * (s.conic(0, 0) * dx * dx + s.conic(1, 1) * dy * dy) -
                               s.conic(0, 1) * dx * dy;
          if (power > 0.0) continue;
          const double raw = s.alpha0 * std::exp(power);
          const double alpha = std::min(kAlphaCap, raw);
          if (alpha < kMinAlpha) continue;
          const double t_next = t * (1.0 - alpha);
          if (t_next < kMinTransmittance) break;
          contribs.push_back({static_cast<std::uint32_t>(k), alpha, t, raw > kAlphaCap});
          t = t_next;
        }

        const Vec3 dLdC(dL_dimage.at(x, y, 0), dL_dimage.at(x, y, 1), dL_dimage.at(x, y, 2));
        if (dLdC.isZero(0.0)) continue;

        // Back-to-front re-traversal: S is the light composited behind the
        // current splat, including the background through T_final.
        Vec3 s_behind = t * opts.background;
        for (auto it = contribs.rbegin(); it != contribs.rend(); ++it) {
          const PreparedSplat& s = prepared[entries[it->entry]];
          BackwardTileAccum& a = accum[it->entry];
          const double alpha = it->alpha;
          const double t_before = it->transmittance;

          a.color += alpha * t_before * dLdC;

          if (!it->capped) {
            const double dL_dalpha =
                dLdC.dot(s.color * t_before - s_behind / (1.0 - alpha));
            a.alpha0 += dL_dalpha * (alpha / s.alpha0);
            const double dL_dpower = dL_dalpha * alpha;
            const Vec2 d(px - s.mean2d.x(), py - s.mean2d.y());
            const Vec2 conic_d = s.conic * d;
            a.mean2d += dL_dpower * conic_d;
            a.conic += (-0.5 * dL_dpower) * (d * d.transpose());
          }
          s_behind += alpha * t_before * s.color;
        }
      }
    }
  });

  // Deterministic reduction into per-splat totals, tile-index order.
  std::vector<BackwardTileAccum> totals(prepared.size());
  for (int tile = 0; tile < n_tiles; ++tile) {
    const auto& entries = list.per_tile[tile];
    const auto& accum = tile_accums[tile];
    for (std::size_t k = 0; k < entries.size(); ++k) {
      BackwardTileAccum& tot = totals[entries[k]];
      tot.mean2d += accum[k].mean2d;
      tot.conic += accum[k].conic;
      tot.alpha0 += accum[k].alpha0;
      tot.color += accum[k].color;
    }
  }

  ParamGrads grads;
  grads.resize_zero(cloud.size());

  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const PreparedSplat& s = prepared[i];
    const BackwardTileAccum& a = totals[i];
    const std::uint32_t gi = s.gaussian_index;
    const Gaussian3D& g = cloud.gaussians[gi];

    aux.ndc_grad[gi] =
        Vec2(a.mean2d.x() * 0.5 * camera.width, a.mean2d.y() * 0.5 * camera.height);

    // conic = cov2d^-1
    const Mat2 dL_dcov2d = -s.conic * a.conic * s.conic;

    // cov2d = M Sigma M^T + reg, M = J W
    const Mat23 j = projection_jacobian(camera, s.p_cam);
    const Mat23 m = j * camera.rotation;
    const Mat3 sigma = covariance_from_parameters(g.rotation, g.log_scale);
    const Mat3 dL_dsigma = m.transpose() * dL_dcov2d * m;
    const Mat23 dL_dm = (dL_dcov2d + dL_dcov2d.transpose()) * m * sigma;
    const Mat23 dL_dj = dL_dm * camera.rotation.transpose();

    Vec4 dL_drot;
    Vec3 dL_dls;
    covariance_backward(g.rotation, g.log_scale, dL_dsigma, dL_drot, dL_dls);

    // J depends on the camera-space mean.
    const double x = s.p_cam.x(), y = s.p_cam.y(), z = s.p_cam.z();
    const double fz2x = -camera.fx / (z * z);
    const double fz2y = -camera.fy / (z * z);
    Vec3 dL_dpcam(dL_dj(0, 2) * fz2x, dL_dj(1, 2) * fz2y,
                  dL_dj(0, 0) * fz2x + dL_dj(1, 1) * fz2y +
                      dL_dj(0, 2) * (2.0 * camera.fx * x / (z * z * z)) +
                      dL_dj(1, 2) * (2.0 * camera.fy * y / (z * z * z)));
    // mean2d shares the projection Jacobian.
    dL_dpcam += j.transpose() * a.mean2d;

    Vec3 dL_dpos = camera.rotation.transpose() * dL_dpcam;

    ShCoeffs dL_dsh;
    Vec3 dL_dview;
    sh_backward(g.sh, s.sh_eval, s.view_vec, a.color, dL_dsh, dL_dview);
    dL_dpos += dL_dview;

    grads.position[gi] = dL_dpos;
    grads.log_scale[gi] = dL_dls;
    grads.rotation[gi] = dL_drot;
    grads.opacity_logit[gi] = a.alpha0 * s.alpha0 * (1.0 - s.alpha0);
    grads.sh[gi] = dL_dsh;
  }
  return grads;
}

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"

namespace attnsplat {

/// Pinhole camera with a world-to-camera rigid pose. Camera space looks
/// down +z; a world point maps to p_cam = rotation * p + translation.
struct Camera {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;
  double near = 0.01, far = 100.0;

  Vec3 world_to_camera(const Vec3& p) const { return rotation * p + translation; }
  Vec3 center() const { return -rotation.transpose() * translation; }

  /// Continuous pixel coordinates of a camera-space point (z > 0).
  Vec2 camera_to_pixel(const Vec3& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }

  /// NDC convention: x = 2 px/width - 1, y = 2 px/height - 1.
  Vec2 pixel_to_ndc(const Vec2& px) const {
    return {2.0 * px.x() / width - 1.0, 2.0 * px.y() / height - 1.0};
  }
};

/// Throws std::invalid_argument when the pose or intrinsics are malformed
/// (non-orthonormal rotation beyond 1e-6, size below 16 px, bad near/far).
void validate_camera(const Camera& cam);

/// Camera at `position` looking toward `target`, world `up` as the up hint.
Camera make_look_at_camera(const Vec3& position, const Vec3& target, const Vec3& up,
                           double fx, double fy, int width, int height,
                           double near, double far);

}  // namespace attnsplat

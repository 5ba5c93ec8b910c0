// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/camera.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

void validate_camera(const Camera& cam) {
  const Mat3 should_be_identity = cam.rotation * cam.rotation.transpose();
  if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
    throw std::invalid_argument("camera: rotation is not orthonormal");
  }
  if (cam.width < 16 || cam.height < 16) {
    throw std::invalid_argument("camera: image size must be at least 16x16");
  }
  if (!(cam.near > 0.0) || !(cam.far > cam.near)) {
    throw std::invalid_argument("camera: requires 0 < near < far");
  }
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) {
    throw std::invalid_argument("camera: focal lengths must be positive");
  }
}

Camera make_look_at_camera(const Vec3& position, const Vec3& target, const Vec3& up,
                           double fx, double fy, int width, int height,
                           double near, double far) {
  const Vec3 forward = (target - position).normalized();
  Vec3 right = up.cross(forward);
  if (right.norm() < 1e-9) {
    // up parallel to the view direction; pick any perpendicular axis
    right = Vec3::UnitX().cross(forward);
    if (right.norm() < 1e-9) right = Vec3::UnitY().cross(forward);
  }
  right.normalize();
  const Vec3 down = forward.cross(right); // +y in image space points down

  Camera cam;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * position;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.width = width;
  cam.height = height;
  cam.near = near;
  cam.far = far;
  validate_camera(cam);
  return cam;
}

}  // namespace attnsplat

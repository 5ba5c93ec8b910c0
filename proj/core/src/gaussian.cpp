// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/gaussian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace attnsplat {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

Mat3 quaternion_to_rotation(const Vec4& q) {
  const Vec4 u = q / q.norm();
  const double w = u[0], x = u[1], y = u[2], z = u[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

namespace {

// dR/du for a unit quaternion u = (w, x, y, z).
std::array<Mat3, 4> rotation_jacobian_unit(const Vec4& u) {
  const double w = u[0], x = u[1], y = u[2], z = u[3];
  std::array<Mat3, 4> j;
  j[0] << 0, -z, y,
      z, 0, -x,
      -y, x, 0;
  j[1] << 0, y, z,
      y, -2 * x, -w,
      z, w, -2 * x;
  j[2] << -2 * y, x, w,
      x, 0, z,
      -w, z, -2 * y;
  j[3] << -2 * z, -w, x,
      w, -2 * z, y,
      x, y, 0;
  for (auto& m : j) m *= 2.0;
  return j;
}

}  // namespace

std::array<Mat3, 4> quaternion_to_rotation_jacobian(const Vec4& q) {
  const double n = q.norm();
  const Vec4 u = q / n;
  const auto j_unit = rotation_jacobian_unit(u);
  // Chain through u = q / |q|:  du_k/dq_l = (delta_kl - u_k u_l) / |q|.
  std::array<Mat3, 4> j;
  for (int l = 0; l < 4; ++l) {
    Mat3 m = Mat3::Zero();
    for (int k = 0; k < 4; ++k) {
      const double duk_dql = ((k == l ? 1.0 : 0.0) - u[k] * u[l]) / n;
      m += j_unit[k] * duk_dql;
    }
    j[l] = m;
  }
  return j;
}

Mat3 covariance_from_parameters(const Vec4& rotation, const Vec3& log_scale) {
  const Mat3 r = quaternion_to_rotation(rotation);
  const Vec3 s2 = (2.0 * log_scale).array().exp();
  return r * s2.asDiagonal() * r.transpose();
}

void covariance_backward(const Vec4& rotation, const Vec3& log_scale,
                         const Mat3& dL_dcov, Vec4& dL_drotation, Vec3& dL_dlog_scale) {
  const Mat3 r = quaternion_to_rotation(rotation);
  const Vec3 s2 = (2.0 * log_scale).array().exp();
  const Mat3 g = 0.5 * (dL_dcov + dL_dcov.transpose());

  // Sigma = R D R^T with D = diag(s^2):
  //   dL/dD   = R^T G R (diagonal part), dL/dlog_s_i = 2 s_i^2 (R^T G R)_ii
  //   dL/dR   = 2 G R D
  const Mat3 rtgr = r.transpose() * g * r;
  for (int i = 0; i < 3; ++i) dL_dlog_scale[i] = 2.0 * s2[i] * rtgr(i, i);

  const Mat3 dL_dr = 2.0 * g * r * s2.asDiagonal();
  const auto jr = quaternion_to_rotation_jacobian(rotation);
  for (int l = 0; l < 4; ++l) dL_drotation[l] = (dL_dr.array() * jr[l].array()).sum();
}

ActivatedGaussian activate(const Gaussian3D& g, std::size_t index) {
  const bool finite = g.position.allFinite() && g.log_scale.allFinite() &&
                      g.rotation.allFinite() && std::isfinite(g.opacity_logit) &&
                      g.sh.allFinite();
  if (!finite) {
    throw std::invalid_argument("gaussian " + std::to_string(index) +
                                ": non-finite parameter");
  }
  if (g.rotation.norm() == 0.0) {
    throw std::invalid_argument("gaussian " + std::to_string(index) +
                                ": zero quaternion");
  }
  ActivatedGaussian out;
  out.mean = g.position;
  out.covariance = covariance_from_parameters(g.rotation, g.log_scale);
  out.opacity = sigmoid(g.opacity_logit);
  out.sh = &g.sh;
  return out;
}

}  // namespace attnsplat

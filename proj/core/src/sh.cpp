// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/sh.hpp"

#include <cmath>
#include <stdexcept>

namespace attnsplat {

namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[7] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};

}  // namespace

Eigen::Matrix<double, kShCoeffCount, 1> sh_basis(const Vec3& dir, int degree) {
  Eigen::Matrix<double, kShCoeffCount, 1> b = Eigen::Matrix<double, kShCoeffCount, 1>::Zero();
  const double x = dir[0], y = dir[1], z = dir[2];
  b[0] = kC0;
  if (degree < 1) return b;
  b[1] = -kC1 * y;
  b[2] = kC1 * z;
  b[3] = -kC1 * x;
  if (degree < 2) return b;
  const double xx = x * x, yy = y * y, zz = z * z;
  b[4] = kC2[0] * x * y;
  b[5] = kC2[1] * y * z;
  b[6] = kC2[2] * (2 * zz - xx - yy);
  b[7] = kC2[3] * x * z;
  b[8] = kC2[4] * (xx - yy);
  if (degree < 3) return b;
  b[9] = kC3[0] * y * (3 * xx - yy);
  b[10] = kC3[1] * x * y * z;
  b[11] = kC3[2] * y * (4 * zz - xx - yy);
  b[12] = kC3[3] * z * (2 * zz - 3 * xx - 3 * yy);
  b[13] = kC3[4] * x * (4 * zz - xx - yy);
  b[14] = kC3[5] * z * (xx - yy);
  b[15] = kC3[6] * x * (xx - 3 * yy);
  return b;
}

void sh_basis_with_jacobian(const Vec3& dir, int degree,
                            Eigen::Matrix<double, kShCoeffCount, 1>& basis,
                            Eigen::Matrix<double, kShCoeffCount, 3>& d) {
  basis = sh_basis(dir, degree);
  d.setZero();
  const double x = dir[0], y = dir[1], z = dir[2];
  if (degree < 1) return;
  d.row(1) = Vec3(0, -kC1, 0).transpose();
  d.row(2) = Vec3(0, 0, kC1).transpose();
  d.row(3) = Vec3(-kC1, 0, 0).transpose();
  if (degree < 2) return;
  const double xx = x * x, yy = y * y, zz = z * z;
  d.row(4) = kC2[0] * Vec3(y, x, 0).transpose();
  d.row(5) = kC2[1] * Vec3(0, z, y).transpose();
  d.row(6) = kC2[2] * Vec3(-2 * x, -2 * y, 4 * z).transpose();
  d.row(7) = kC2[3] * Vec3(z, 0, x).transpose();
  d.row(8) = kC2[4] * Vec3(2 * x, -2 * y, 0).transpose();
  if (degree < 3) return;
  d.row(9) = kC3[0] * Vec3(6 * x * y, 3 * xx - 3 * yy, 0).transpose();
  d.row(10) = kC3[1] * Vec3(y * z, x * z, x * y).transpose();
  d.row(11) = kC3[2] * Vec3(-2 * x * y, 4 * zz - xx - 3 * yy, 8 * y * z).transpose();
  d.row(12) = kC3[3] * Vec3(-6 * x * z, -6 * y * z, 6 * zz - 3 * xx - 3 * yy).transpose();
  d.row(13) = kC3[4] * Vec3(4 * zz - 3 * xx - yy, -2 * x * y, 8 * x * z).transpose();
  d.row(14) = kC3[5] * Vec3(2 * x * z, -2 * y * z, xx - yy).transpose();
  d.row(15) = kC3[6] * Vec3(3 * xx - 3 * yy, -6 * x * y, 0).transpose();
}

Vec3 evaluate_sh(const ShCoeffs& coeffs, const Vec3& dir, int degree) {
  const double n = dir.norm();
  if (n == 0.0) throw std::invalid_argument("evaluate_sh: zero-length direction");
  const auto b = sh_basis(dir / n, degree);
  Vec3 rgb = (coeffs.transpose() * b).array() + 0.5;
  return rgb.cwiseMax(0.0);
}

ShEval evaluate_sh_with_gradient(const ShCoeffs& coeffs, const Vec3& unit_dir, int degree) {
  ShEval e;
  sh_basis_with_jacobian(unit_dir, degree, e.basis, e.d_basis_d_dir);
  Vec3 raw = (coeffs.transpose() * e.basis).array() + 0.5;
  for (int c = 0; c < 3; ++c) e.clamped[c] = raw[c] < 0.0 ? 1 : 0;
  e.rgb = raw.cwiseMax(0.0);
  return e;
}

void sh_backward(const ShCoeffs& coeffs, const ShEval& eval, const Vec3& v,
                 const Vec3& dL_drgb, ShCoeffs& dL_dcoeffs, Vec3& dL_dv) {
  Vec3 g = dL_drgb;
  for (int c = 0; c < 3; ++c)
    if (eval.clamped[c]) g[c] = 0.0;

  dL_dcoeffs = eval.basis * g.transpose();

  // dL/ddir through the basis, then dir = v/|v|.
  const Vec3 dL_ddir = eval.d_basis_d_dir.transpose() * (coeffs * g);
  const double n = v.norm();
  const Vec3 dir = v / n;
  dL_dv = (dL_ddir - dir * dir.dot(dL_ddir)) / n;
}

}  // namespace attnsplat

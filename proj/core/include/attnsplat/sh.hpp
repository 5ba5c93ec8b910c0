// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/gaussian.hpp"

namespace attnsplat {

/// Real spherical-harmonics basis values for a unit direction, bands 0..degree.
/// Entries above the requested degree are left at zero.
Eigen::Matrix<double, kShCoeffCount, 1> sh_basis(const Vec3& dir, int degree);

/// Basis values plus their Jacobian with respect to the (unit) direction.
void sh_basis_with_jacobian(const Vec3& dir, int degree,
                            Eigen::Matrix<double, kShCoeffCount, 1>& basis,
                            Eigen::Matrix<double, kShCoeffCount, 3>& d_basis_d_dir);

/// View-dependent color: 0.5 + sum_i c_i * Y_i(dir), clamped to >= 0.
/// `dir` must be non-zero; it is normalized internally.
Vec3 evaluate_sh(const ShCoeffs& coeffs, const Vec3& dir, int degree);

/// Color evaluation that also reports what the backward pass needs:
/// the basis row vector and, per channel, whether the clamp was active.
struct ShEval {
  Vec3 rgb;
  Eigen::Matrix<double, kShCoeffCount, 1> basis;
  Eigen::Matrix<double, kShCoeffCount, 3> d_basis_d_dir;
  Eigen::Vector3i clamped; // 1 where rgb hit the zero clamp
};

ShEval evaluate_sh_with_gradient(const ShCoeffs& coeffs, const Vec3& unit_dir, int degree);

/// Chains dL/drgb back to SH coefficients and to the unnormalized
/// view vector v (dir = v / |v|).
void sh_backward(const ShCoeffs& coeffs, const ShEval& eval, const Vec3& v,
                 const Vec3& dL_drgb, ShCoeffs& dL_dcoeffs, Vec3& dL_dv);

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <vector>

namespace attnsplat {

inline constexpr int kMaxShDegree = 3;
inline constexpr int kShCoeffCount = (kMaxShDegree + 1) * (kMaxShDegree + 1); // 16 per channel

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// SH coefficients, one row per basis function, one column per color channel.
using ShCoeffs = Eigen::Matrix<double, kShCoeffCount, 3>;

/// One optimizable Gaussian primitive. Raw parameters are unconstrained;
/// scale and opacity are activated through exp/sigmoid on use.
struct Gaussian3D {
  Vec3 position = Vec3::Zero();
  Vec3 log_scale = Vec3::Zero();
  Vec4 rotation = Vec4(1, 0, 0, 0); // quaternion (w, x, y, z), unit norm
  double opacity_logit = 0.0;
  ShCoeffs sh = ShCoeffs::Zero();
};

/// Activated view of a Gaussian: world-space mean and covariance plus
/// the post-sigmoid opacity.
struct ActivatedGaussian {
  Vec3 mean = Vec3::Zero();
  Mat3 covariance = Mat3::Identity();
  double opacity = 0.0;
  const ShCoeffs* sh = nullptr;
};

struct GaussianCloud {
  std::vector<Gaussian3D> gaussians;
  int active_sh_degree = 0;

  std::size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
};

double sigmoid(double x);
double logit(double p);

/// Rotation matrix of a quaternion (w, x, y, z). The quaternion is
/// normalized internally.
Mat3 quaternion_to_rotation(const Vec4& q);

/// Partial derivatives of quaternion_to_rotation with respect to the raw
/// (unnormalized) quaternion components, including the normalization chain.
std::array<Mat3, 4> quaternion_to_rotation_jacobian(const Vec4& q);

/// Activates scale/rotation/opacity into mean, covariance and alpha.
/// Throws std::invalid_argument naming `index` on non-finite parameters.
ActivatedGaussian activate(const Gaussian3D& g, std::size_t index = 0);

/// Covariance from raw parameters: R * diag(exp(log_scale)^2) * R^T.
Mat3 covariance_from_parameters(const Vec4& rotation, const Vec3& log_scale);

/// Gradients of a symmetric loss-covariance adjoint back to the raw
/// rotation quaternion and log-scales.
void covariance_backward(const Vec4& rotation, const Vec3& log_scale,
                         const Mat3& dL_dcov, Vec4& dL_drotation, Vec3& dL_dlog_scale);

}  // namespace attnsplat

// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "attnsplat/image.hpp"

#include <string>
#include <vector>

namespace attnsplat {

/// 10 log10(1 / MSE) for images in [0,1]; identical images report the
/// 100 dB sentinel cap, and no value ever exceeds it.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01,
/// K2=0.03, unit dynamic range, valid-window cropping, channel-averaged.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

/// SSIM plus its gradient with respect to `b`.
double ssim_with_gradient(const ImageBuffer& a, const ImageBuffer& b, ImageBuffer& dssim_db);

struct MetricReport {
  std::vector<std::string> view_names;
  std::vector<double> psnr_per_view;
  std::vector<double> ssim_per_view;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
};

MetricReport make_report(std::vector<std::string> names, std::vector<double> psnrs,
                         std::vector<double> ssims);

std::string report_to_table(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);

}  // namespace attnsplat

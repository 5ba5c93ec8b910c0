// Copyright Contributors to the attnsplat project
// SPDX-License-Identifier: Apache-2.0

#include "attnsplat/metrics.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace attnsplat {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = (0.01 * 0.01); // (K1 L)^2 with L = 1
constexpr double kC2 = (0.03 * 0.03);

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

std::vector<double> gaussian_window() {
  std::vector<double> w(static_cast<std::size_t>(kWindow) * kWindow);
  double sum = 0.0;
  const int r = kWindow / 2;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-0.5 * (dx * dx + dy * dy) / (kWindowSigma * kWindowSigma));
      w[static_cast<std::size_t>(dy + r) * kWindow + (dx + r)] = v;
      sum += v;
    }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.count());
  if (mse == 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

double ssim_impl(const ImageBuffer& a, const ImageBuffer& b, ImageBuffer* grad) {
  require_same_shape(a, b, "ssim");
  if (a.width < kWindow || a.height < kWindow) {
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  }
  const bool want_grad = grad != nullptr;
  if (want_grad) *grad = ImageBuffer(a.width, a.height, 0.0);

  static const std::vector<double> window = gaussian_window();
  const int r = kWindow / 2;
  const int cx0 = r, cx1 = a.width - r;  // valid window centers
  const int cy0 = r, cy1 = a.height - r;
  const double n_windows = static_cast<double>(cx1 - cx0) * (cy1 - cy0) * 3.0;

  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int cy = cy0; cy < cy1; ++cy) {
      for (int cx = cx0; cx < cx1; ++cx) {
        double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double w = window[static_cast<std::size_t>(dy + r) * kWindow + (dx + r)];
            const double va = a.at(cx + dx, cy + dy, c);
            const double vb = b.at(cx + dx, cy + dy, c);
            mu_a += w * va;
            mu_b += w * vb;
            aa += w * (va * va);
            bb += w * (vb * vb);
            ab += w * (va * vb); // symmetric association keeps ssim(a,b) == ssim(b,a)
          }
        }
        const double ma2 = mu_a * mu_a;
        const double mb2 = mu_b * mu_b;
        const double var_a = aa - ma2;
        const double var_b = bb - mb2;
        const double cov = ab - mu_a * mu_b;

        const double n1 = 2.0 * (mu_a * mu_b) + kC1;
        const double n2 = 2.0 * cov + kC2;
        const double d1 = (ma2 + mb2) + kC1;
        const double d2 = (var_a + var_b) + kC2;
        const double s = (n1 * n2) / (d1 * d2);
        total += s;

        if (want_grad) {
          // dS/db_k for each pixel k in the window, scattered back.
          const double inv_d1d2 = 1.0 / (d1 * d2);
          for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
              const double w = window[static_cast<std::size_t>(dy + r) * kWindow + (dx + r)];
              const double va = a.at(cx + dx, cy + dy, c);
              const double vb = b.at(cx + dx, cy + dy, c);
              const double g = w * ((2.0 * mu_a * n2 + 2.0 * n1 * (va - mu_a)) * inv_d1d2 -
                                    s * (2.0 * mu_b / d1 + 2.0 * (vb - mu_b) / d2));
              grad->at(cx + dx, cy + dy, c) += g / n_windows;
            }
          }
        }
      }
    }
  }
  return total / n_windows;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) { return ssim_impl(a, b, nullptr); }

double ssim_with_gradient(const ImageBuffer& a, const ImageBuffer& b, ImageBuffer& dssim_db) {
  return ssim_impl(a, b, &dssim_db);
}

MetricReport make_report(std::vector<std::string> names, std::vector<double> psnrs,
                         std::vector<double> ssims) {
  if (names.size() != psnrs.size() || names.size() != ssims.size()) {
    throw std::invalid_argument("make_report: column lengths differ");
  }
  MetricReport r;
  r.view_names = std::move(names);
  r.psnr_per_view = std::move(psnrs);
  r.ssim_per_view = std::move(ssims);
  const double n = r.view_names.empty() ? 1.0 : static_cast<double>(r.view_names.size());
  r.mean_psnr = std::accumulate(r.psnr_per_view.begin(), r.psnr_per_view.end(), 0.0) / n;
  r.mean_ssim = std::accumulate(r.ssim_per_view.begin(), r.ssim_per_view.end(), 0.0) / n;
  return r;
}

std::string report_to_table(const MetricReport& report) {
  std::ostringstream out;
  out << "view                     psnr      ssim\n";
  char line[128];
  for (std::size_t i = 0; i < report.view_names.size(); ++i) {
    std::snprintf(line, sizeof(line), "%-20s %9.4f %9.6f\n", report.view_names[i].c_str(),
                  report.psnr_per_view[i], report.ssim_per_view[i]);
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-20s %9.4f %9.6f\n", "mean", report.mean_psnr,
                report.mean_ssim);
  out << line;
  return out.str();
}

std::string report_to_csv(const MetricReport& report) {
  std::ostringstream out;
  out << "view,psnr,ssim\n";
  out.precision(10);
  for (std::size_t i = 0; i < report.view_names.size(); ++i) {
    out << report.view_names[i] << "," << report.psnr_per_view[i] << ","
        << report.ssim_per_view[i] << "\n";
  }
  out << "mean," << report.mean_psnr << "," << report.mean_ssim << "\n";
  return out.str();
}

}  // namespace attnsplat

#pragma once

#include <vector>

#include "c2b/image.hpp"

namespace c2b {

// PSNR in dB. Identical inputs return the documented cap of 99.0 dB so
// reports stay finite and sortable.
inline constexpr double kPsnrCap = 99.0;

double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1.0. Requires both dimensions >= 11.
double ssim(const Image& a, const Image& b);

struct MetricReport {
  std::vector<double> psnr_per_frame;
  std::vector<double> ssim_per_frame;
  double psnr_mean = 0.0;
  double ssim_mean = 0.0;
  int middle_frame = 0;  // index T/2
  double psnr_middle = 0.0;
  double ssim_middle = 0.0;
};

MetricReport video_report(const VideoCube& pred, const VideoCube& truth);

// Mean per-frame PSNR against the truth minus mean per-frame PSNR against
// the time-reversed truth. Positive means the prediction follows the true
// motion direction.
double direction_score(const VideoCube& pred, const VideoCube& truth);

}  // namespace c2b

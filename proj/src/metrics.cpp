#include "c2b/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "c2b/errors.hpp"

namespace c2b {

namespace {

void require_same_dims(const Image& a, const Image& b, const char* what) {
  if (a.height != b.height || a.width != b.width) {
    throw DimensionError(std::string(what) + ": " + std::to_string(a.height) + "x" +
                         std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                         std::to_string(b.width));
  }
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kDynamicRange = 1.0;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Valid-mode separable Gaussian filtering: (h, w) -> (h-10, w-10).
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w) {
  const auto taps = gaussian_taps();
  const int wo = w - kWindow + 1;
  const int ho = h - kWindow + 1;
  std::vector<double> rows(static_cast<size_t>(h) * wo);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * plane[static_cast<size_t>(y) * w + x + k];
      rows[static_cast<size_t>(y) * wo + x] = acc;
    }
  }
  std::vector<double> out(static_cast<size_t>(ho) * wo);
  for (int y = 0; y < ho; ++y) {
    for (int x = 0; x < wo; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += taps[k] * rows[static_cast<size_t>(y + k) * wo + x];
      out[static_cast<size_t>(y) * wo + x] = acc;
    }
  }
  return out;
}

double mean_frame_psnr(const VideoCube& pred, const VideoCube& truth) {
  double sum = 0.0;
  for (int t = 0; t < pred.length(); ++t) sum += psnr(pred.frame(t), truth.frame(t));
  return sum / pred.length();
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same_dims(a, b, "psnr inputs differ");
  if (!(peak > 0.0)) throw ValueError("psnr peak must be positive");
  double se = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.values.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image& a, const Image& b) {
  require_same_dims(a, b, "ssim inputs differ");
  if (a.height < kWindow || a.width < kWindow) {
    throw DimensionError("ssim needs images at least 11x11, got " + std::to_string(a.height) +
                         "x" + std::to_string(a.width));
  }
  const int h = a.height;
  const int w = a.width;
  const size_t count = a.values.size();
  std::vector<double> aa(count), bb(count), ab(count);
  for (size_t i = 0; i < count; ++i) {
    aa[i] = a.values[i] * a.values[i];
    bb[i] = b.values[i] * b.values[i];
    ab[i] = a.values[i] * b.values[i];
  }
  const auto mu_a = filter_valid(a.values, h, w);
  const auto mu_b = filter_valid(b.values, h, w);
  const auto m_aa = filter_valid(aa, h, w);
  const auto m_bb = filter_valid(bb, h, w);
  const auto m_ab = filter_valid(ab, h, w);

  const double c1 = (kK1 * kDynamicRange) * (kK1 * kDynamicRange);
  const double c2 = (kK2 * kDynamicRange) * (kK2 * kDynamicRange);
  double total = 0.0;
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double va = m_aa[i] - mu_a[i] * mu_a[i];
    const double vb = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

MetricReport video_report(const VideoCube& pred, const VideoCube& truth) {
  if (pred.length() != truth.length()) {
    throw DimensionError("video_report frame counts differ: " + std::to_string(pred.length()) +
                         " vs " + std::to_string(truth.length()));
  }
  MetricReport report;
  for (int t = 0; t < pred.length(); ++t) {
    report.psnr_per_frame.push_back(psnr(pred.frame(t), truth.frame(t)));
    report.ssim_per_frame.push_back(ssim(pred.frame(t), truth.frame(t)));
    report.psnr_mean += report.psnr_per_frame.back();
    report.ssim_mean += report.ssim_per_frame.back();
  }
  report.psnr_mean /= pred.length();
  report.ssim_mean /= pred.length();
  report.middle_frame = pred.length() / 2;
  report.psnr_middle = report.psnr_per_frame[report.middle_frame];
  report.ssim_middle = report.ssim_per_frame[report.middle_frame];
  return report;
}

double direction_score(const VideoCube& pred, const VideoCube& truth) {
  if (pred.length() != truth.length()) {
    throw DimensionError("direction_score frame counts differ: " +
                         std::to_string(pred.length()) + " vs " + std::to_string(truth.length()));
  }
  return mean_frame_psnr(pred, truth) - mean_frame_psnr(pred, reverse_time(truth));
}

}  // namespace c2b

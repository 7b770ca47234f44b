#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "c2b/errors.hpp"

namespace c2b {

// Single-channel intensity plane, row-major, values nominally in [0,1].
// Plain container: range checks live in the types that own invariants
// (VideoCube, CodedImage, ...).
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw DimensionError("Image: dimensions must be positive");
  }

  double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return values.size(); }

  bool same_dims(const Image& o) const { return height == o.height && width == o.width; }
};

inline bool finite_unit_range(const Image& img) {
  for (double v : img.values) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
  }
  return true;
}

// T-frame single-channel video, every value finite and in [0,1].
class VideoCube {
 public:
  VideoCube() = default;

  explicit VideoCube(std::vector<Image> frames) : frames_(std::move(frames)) {
    if (frames_.empty()) throw DimensionError("VideoCube: needs at least one frame");
    for (const Image& f : frames_) {
      if (!f.same_dims(frames_.front()))
        throw DimensionError("VideoCube: frames must share dimensions");
      if (!finite_unit_range(f))
        throw ValueError("VideoCube: values must be finite and in [0,1]");
    }
  }

  int height() const { return frames_.front().height; }
  int width() const { return frames_.front().width; }
  int length() const { return static_cast<int>(frames_.size()); }

  const Image& frame(int t) const { return frames_[t]; }
  const std::vector<Image>& frames() const { return frames_; }

  double at(int y, int x, int t) const { return frames_[t].at(y, x); }

 private:
  std::vector<Image> frames_;
};

// Low-resolution video recovered from a single observation. Same contract as
// VideoCube (values clamped to [0,1] after the solve), so it shares the type.
using LowResVideo = VideoCube;

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline VideoCube reverse_time(const VideoCube& v) {
  std::vector<Image> frames(v.frames().rbegin(), v.frames().rend());
  return VideoCube(std::move(frames));
}

}  // namespace c2b

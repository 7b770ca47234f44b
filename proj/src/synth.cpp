#include "c2b/synth.hpp"

#include <algorithm>

#include "c2b/rng.hpp"

namespace c2b {

namespace {

constexpr uint64_t kSynthKey = 0x5e1f;
constexpr int kNoiseCell = 8;  // texture feature size in pixels

// Bilinearly interpolated value noise mapped into [lo, hi].
Image value_noise(int h, int w, double lo, double hi, Rng& rng) {
  const int gh = h / kNoiseCell + 2;
  const int gw = w / kNoiseCell + 2;
  std::vector<double> grid(static_cast<size_t>(gh) * gw);
  for (double& g : grid) g = rng.next_double();
  const auto at = [&](int gy, int gx) { return grid[static_cast<size_t>(gy) * gw + gx]; };

  Image img(h, w);
  for (int y = 0; y < h; ++y) {
    const int gy = y / kNoiseCell;
    const double fy = static_cast<double>(y % kNoiseCell) / kNoiseCell;
    for (int x = 0; x < w; ++x) {
      const int gx = x / kNoiseCell;
      const double fx = static_cast<double>(x % kNoiseCell) / kNoiseCell;
      const double top = at(gy, gx) * (1.0 - fx) + at(gy, gx + 1) * fx;
      const double bot = at(gy + 1, gx) * (1.0 - fx) + at(gy + 1, gx + 1) * fx;
      img.at(y, x) = lo + (hi - lo) * (top * (1.0 - fy) + bot * fy);
    }
  }
  return img;
}

}  // namespace

void SynthSpec::validate() const {
  if (count <= 0) throw ValueError("synth: count must be positive");
  if (frames <= 0) throw ValueError("synth: frames must be positive");
  if (height <= 0 || width <= 0) throw DimensionError("synth: frame dims must be positive");
  if (rect_h <= 0 || rect_w <= 0) throw DimensionError("synth: rect dims must be positive");
  if (rect_h > height || rect_w > width) {
    throw DimensionError("synth: rectangle " + std::to_string(rect_h) + "x" +
                         std::to_string(rect_w) + " exceeds frame " + std::to_string(height) +
                         "x" + std::to_string(width));
  }
}

void rect_origin(const SynthSpec& spec, int t, int& oy, int& ox) {
  const int half = (spec.frames - 1) / 2;
  oy = (spec.height - spec.rect_h) / 2 - spec.vy * half + t * spec.vy;
  ox = (spec.width - spec.rect_w) / 2 - spec.vx * half + t * spec.vx;
}

VideoCube synth_clip(const SynthSpec& spec, uint64_t seed, int index) {
  spec.validate();
  Rng rng = Rng::split(seed, kSynthKey, static_cast<uint64_t>(index));
  const Image background = value_noise(spec.height, spec.width, 0.05, 0.45, rng);
  const Image rect = value_noise(spec.rect_h, spec.rect_w, 0.55, 0.95, rng);

  std::vector<Image> frames;
  frames.reserve(spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    Image frame = background;
    int oy = 0;
    int ox = 0;
    rect_origin(spec, t, oy, ox);
    const int y0 = std::max(0, oy);
    const int y1 = std::min(spec.height, oy + spec.rect_h);
    const int x0 = std::max(0, ox);
    const int x1 = std::min(spec.width, ox + spec.rect_w);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        frame.at(y, x) = rect.at(y - oy, x - ox);
      }
    }
    frames.push_back(std::move(frame));
  }
  return VideoCube(std::move(frames));
}

std::vector<VideoCube> synth_dataset(const SynthSpec& spec, uint64_t seed) {
  spec.validate();
  std::vector<VideoCube> clips;
  clips.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) clips.push_back(synth_clip(spec, seed, i));
  return clips;
}

Image dynamic_mask(const SynthSpec& spec) {
  spec.validate();
  Image mask(spec.height, spec.width, 0.0);
  for (int t = 0; t < spec.frames; ++t) {
    int oy = 0;
    int ox = 0;
    rect_origin(spec, t, oy, ox);
    const int y0 = std::max(0, oy);
    const int y1 = std::min(spec.height, oy + spec.rect_h);
    const int x0 = std::max(0, ox);
    const int x1 = std::min(spec.width, ox + spec.rect_w);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) mask.at(y, x) = 1.0;
    }
  }
  return mask;
}

}  // namespace c2b

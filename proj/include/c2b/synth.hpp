#pragma once

#include <cstdint>
#include <vector>

#include "c2b/image.hpp"

namespace c2b {

// Textured rectangle translating over a static textured background. The
// trajectory is centered: the rectangle starts offset by -v*(T-1)/2 from the
// frame center and advances v pixels per frame, so for odd frame counts a
// clip with velocity -v is exactly the time reversal of the clip with +v.
// Textures are drawn independently of the velocity to keep that exact.
struct SynthSpec {
  int count = 8;     // clips in the dataset
  int height = 72;
  int width = 72;
  int frames = 9;
  int rect_h = 24;
  int rect_w = 24;
  int vx = 2;        // pixels per frame, signed; +x is rightward
  int vy = 0;        // +y is downward

  void validate() const;
};

VideoCube synth_clip(const SynthSpec& spec, uint64_t seed, int index);
std::vector<VideoCube> synth_dataset(const SynthSpec& spec, uint64_t seed);

// Rectangle origin (top-left) at frame t, before clipping to the frame.
void rect_origin(const SynthSpec& spec, int t, int& oy, int& ox);

// 1 where the rectangle covers the pixel in any frame, 0 elsewhere. Shared
// by every clip of a dataset since the trajectory is texture-independent.
Image dynamic_mask(const SynthSpec& spec);

}  // namespace c2b

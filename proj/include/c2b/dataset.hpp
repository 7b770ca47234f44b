#pragma once

#include <string>
#include <vector>

#include "c2b/code.hpp"
#include "c2b/image.hpp"
#include "c2b/imaging.hpp"
#include "c2b/lowres.hpp"
#include "c2b/model.hpp"

namespace c2b {

// One supervised example: low-resolution inputs recovered from the simulated
// observations, and the original clip as the full-resolution target.
// Pair variant: inputs = {coded, blurred}; single variants keep one entry.
struct TrainExample {
  std::vector<LowResVideo> inputs;
  VideoCube target;
};

// Consecutive T-frame windows. stride 0 means stride = length
// (non-overlapping); yields floor((len - T) / stride) + 1 clips.
std::vector<VideoCube> window_clips(const std::vector<Image>& frames, int length = 9,
                                    int stride = 0);

// Non-overlapping size x size crops applied identically to every frame;
// edge remainders are dropped.
std::vector<VideoCube> extract_patches(const VideoCube& clip, int size);

TrainExample make_example(const VideoCube& clip, const TiledCode& code, ModelVariant variant);

// Accepts either a directory of frames (one sequence) or a directory of
// subdirectories (one sequence each, in name order); windows every sequence.
std::vector<VideoCube> load_clip_directory(const std::string& path, int length = 9,
                                           int stride = 0);

struct DatasetSplit {
  std::vector<VideoCube> train;
  std::vector<VideoCube> val;
};

// Even clip indices train, odd validate.
DatasetSplit split_by_parity(const std::vector<VideoCube>& clips);

}  // namespace c2b

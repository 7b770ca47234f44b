#pragma once

#include <cstdint>
#include <vector>

#include "c2b/checkpoint.hpp"
#include "c2b/code.hpp"
#include "c2b/config.hpp"
#include "c2b/image.hpp"

namespace c2b {

// One optimizer step of the objective: total = data + lambda * smooth, with
// the data term an L1 distance and the smoothness term an anisotropic total
// variation of the prediction. Recorded exactly as computed on the tape.
struct StepLoss {
  int64_t step = 0;  // 1-based, cumulative across resumes
  double total = 0.0;
  double data_term = 0.0;
  double smooth_term = 0.0;
};

struct TrainResult {
  TrainedState state;
  std::vector<StepLoss> history;  // steps run by this call only
};

// Patches every clip, simulates the observations, and optimizes the model.
// Deterministic for a given config and seed: weight init, the per-epoch
// shuffle, and synthesis all derive from split streams of config.seed.
// Passing `resume` continues a run: the schedule picks up mid-epoch exactly
// where the step counter left off, so an interrupted run replays the same
// batches an uninterrupted one would have seen.
TrainResult train_model(const TrainConfig& config, const ExposureCode& code,
                        const std::vector<VideoCube>& clips,
                        const TrainedState* resume = nullptr);

}  // namespace c2b

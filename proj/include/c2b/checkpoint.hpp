#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c2b/adam.hpp"
#include "c2b/model.hpp"

namespace c2b {

// Everything a run needs to resume or reconstruct: model structure and
// parameters, optimizer moments, the training step count, and the exposure
// code the inputs were acquired with. Arrays round-trip bit-exact.
struct TrainedState {
  ModelConfig model;
  std::vector<Param> params;
  std::vector<Tensor> adam_m;
  std::vector<Tensor> adam_v;
  int64_t step = 0;
  AdamConfigT<float> adam;
  std::string code_text;  // serialized exposure code; empty if none recorded

  FusionModel make_model() const { return FusionModel(model, params); }
  Adam make_optimizer() const;
};

TrainedState capture_state(const FusionModel& model, const Adam& optimizer,
                           const std::string& code_text);

// Layout: "C2BV" magic, u32 LE version, a string key/value block for the
// hyperparameters, then named arrays as (u32 name length, name bytes,
// u32 rank, dims as u64 LE, payload as f32 LE). Optimizer moments are
// stored under "adam.m:<param>" / "adam.v:<param>".
void save_checkpoint(const std::string& path, const TrainedState& state);
TrainedState load_checkpoint(const std::string& path);

inline constexpr uint32_t kCheckpointVersion = 1;

}  // namespace c2b

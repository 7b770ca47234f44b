#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "c2b/image.hpp"
#include "c2b/tape.hpp"

namespace c2b {

enum class ModelVariant { kPair, kCoded, kBlurred };

ModelVariant parse_variant(const std::string& text);  // "pair" | "coded" | "blurred"
std::string variant_name(ModelVariant v);

// Structural hyperparameters. The shared encoder is fixed at 64/64/128
// channels; the U-Net widths are open because no reference pins them down.
struct ModelConfig {
  ModelVariant variant = ModelVariant::kPair;
  int frames = 9;                             // temporal length T, input channels
  int tile = 3;                               // N; final upsample factor
  std::array<int, 3> unet_widths{64, 128, 256};
  int bottleneck = 512;

  void validate() const;
};

// The two-branch reconstruction network: shared encoder, cosine attention,
// weighted fusion, three-level U-Net, sub-pixel upsample. Single-input
// variants skip attention and feed the 128-channel features straight into
// the U-Net. Graphs are built on a caller-owned tape so training and
// gradient checks can drive forward/backward explicitly.
template <typename S>
class FusionModelT {
 public:
  using Id = typename TapeT<S>::Id;

  FusionModelT(const ModelConfig& config, uint64_t seed);
  // Wraps existing parameters (checkpoint load); names and shapes must match
  // what construction with the same config would produce.
  FusionModelT(const ModelConfig& config, std::vector<ParamT<S>> params);

  const ModelConfig& config() const { return config_; }
  std::vector<ParamT<S>>& params() { return params_; }
  const std::vector<ParamT<S>>& params() const { return params_; }

  // Copies current parameter values onto the tape, one leaf per parameter in
  // params() order. The returned ids feed the graph builders below.
  std::vector<Id> bind(TapeT<S>& tape) const;

  // 128-channel features at the input resolution.
  Id encode(TapeT<S>& tape, const std::vector<Id>& p, Id x) const;
  // Normalized attention in [0,1]: (cosine + 1) / 2.
  Id attention(TapeT<S>& tape, Id phi_c, Id phi_f) const;
  // concat(A * phi_f, (1 - A) * phi_c), 256 channels.
  Id fuse(TapeT<S>& tape, Id phi_c, Id phi_f, Id att) const;
  // U-Net plus sub-pixel upsample; emits frames channels at tile times the
  // spatial resolution. Unclamped.
  Id unet(TapeT<S>& tape, const std::vector<Id>& p, Id features) const;

  struct PairForward {
    Id prediction;
    Id attention;
  };
  PairForward forward_pair(TapeT<S>& tape, const std::vector<Id>& p, Id xc, Id xf) const;
  Id forward_single(TapeT<S>& tape, const std::vector<Id>& p, Id x) const;

  // Inference wrappers: run the graph on a throwaway tape and clamp the
  // prediction to [0,1]. Variant-checked.
  VideoCube predict_pair(const LowResVideo& xc, const LowResVideo& xf) const;
  VideoCube predict_single(const LowResVideo& x) const;
  Image attention_image(const LowResVideo& xc, const LowResVideo& xf) const;

 private:
  struct ConvRef {
    int weight = 0;
    int bias = 0;
  };

  void build_layout();
  ConvRef add_conv(const std::string& name, int in_ch, int out_ch, int k);
  void init_params(uint64_t seed);
  Id conv_relu(TapeT<S>& tape, const std::vector<Id>& p, const ConvRef& ref, Id x) const;

  ModelConfig config_;
  std::vector<ParamT<S>> params_;
  std::vector<std::pair<std::string, std::array<int, 4>>> layout_;  // name -> shape
  ConvRef enc1_, enc2_, enc3_;
  ConvRef d1a_, d1b_, d2a_, d2b_, d3a_, d3b_;
  ConvRef bna_, bnb_;
  ConvRef u3a_, u3b_, u2a_, u2b_, u1a_, u1b_;
  ConvRef head_;
};

extern template class FusionModelT<float>;
extern template class FusionModelT<double>;

using FusionModel = FusionModelT<float>;

// Frames-as-channels bridge: a T-frame clip becomes a 1 x T x h x w tensor.
template <typename S>
TensorT<S> clip_to_tensor(const VideoCube& clip);

// Batch element back to frames, clamped to [0,1].
template <typename S>
VideoCube tensor_to_clip(const TensorT<S>& t, int batch_index);

}  // namespace c2b

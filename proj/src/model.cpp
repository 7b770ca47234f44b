#include "c2b/model.hpp"

#include <cmath>
#include <utility>

#include "c2b/rng.hpp"

namespace c2b {

namespace {

constexpr int kEncMid = 64;
constexpr int kEncOut = 128;

}  // namespace

ModelVariant parse_variant(const std::string& text) {
  if (text == "pair") return ModelVariant::kPair;
  if (text == "coded") return ModelVariant::kCoded;
  if (text == "blurred") return ModelVariant::kBlurred;
  throw ConfigError("unknown variant '" + text + "' (expected pair, coded, or blurred)");
}

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::kPair:
      return "pair";
    case ModelVariant::kCoded:
      return "coded";
    case ModelVariant::kBlurred:
      return "blurred";
  }
  throw ValueError("variant_name: bad enum value");
}

void ModelConfig::validate() const {
  if (frames < 1) throw ConfigError("model: frames must be >= 1");
  if (tile < 1) throw ConfigError("model: tile must be >= 1");
  for (int w : unet_widths) {
    if (w < 1) throw ConfigError("model: unet widths must be >= 1");
  }
  if (bottleneck < 1) throw ConfigError("model: bottleneck width must be >= 1");
}

template <typename S>
FusionModelT<S>::FusionModelT(const ModelConfig& config, uint64_t seed) : config_(config) {
  config_.validate();
  build_layout();
  init_params(seed);
}

template <typename S>
FusionModelT<S>::FusionModelT(const ModelConfig& config, std::vector<ParamT<S>> params)
    : config_(config) {
  config_.validate();
  build_layout();
  if (params.size() != layout_.size()) {
    throw ValueError("model: expected " + std::to_string(layout_.size()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& [name, shape] = layout_[i];
    if (params[i].name != name) {
      throw ValueError("model: parameter " + std::to_string(i) + " should be '" + name +
                       "', got '" + params[i].name + "'");
    }
    const TensorT<S>& v = params[i].value;
    if (v.b != shape[0] || v.c != shape[1] || v.h != shape[2] || v.w != shape[3]) {
      throw DimensionError("model: parameter '" + name + "' has shape " + v.shape_str());
    }
  }
  params_ = std::move(params);
}

template <typename S>
typename FusionModelT<S>::ConvRef FusionModelT<S>::add_conv(const std::string& name, int in_ch,
                                                            int out_ch, int k) {
  ConvRef ref;
  ref.weight = static_cast<int>(layout_.size());
  layout_.emplace_back(name + ".weight", std::array<int, 4>{out_ch, in_ch, k, k});
  ref.bias = static_cast<int>(layout_.size());
  layout_.emplace_back(name + ".bias", std::array<int, 4>{1, out_ch, 1, 1});
  return ref;
}

template <typename S>
void FusionModelT<S>::build_layout() {
  enc1_ = add_conv("enc.conv1", config_.frames, kEncMid, 3);
  enc2_ = add_conv("enc.conv2", kEncMid, kEncMid, 3);
  enc3_ = add_conv("enc.conv3", kEncMid, kEncOut, 3);

  const bool pair = config_.variant == ModelVariant::kPair;
  const int unet_in = pair ? 2 * kEncOut : kEncOut;
  const auto [w1, w2, w3] = config_.unet_widths;
  const int wb = config_.bottleneck;

  d1a_ = add_conv("unet.down1.conv1", unet_in, w1, 3);
  d1b_ = add_conv("unet.down1.conv2", w1, w1, 3);
  d2a_ = add_conv("unet.down2.conv1", w1, w2, 3);
  d2b_ = add_conv("unet.down2.conv2", w2, w2, 3);
  d3a_ = add_conv("unet.down3.conv1", w2, w3, 3);
  d3b_ = add_conv("unet.down3.conv2", w3, w3, 3);
  bna_ = add_conv("unet.bottleneck.conv1", w3, wb, 3);
  bnb_ = add_conv("unet.bottleneck.conv2", wb, wb, 3);
  u3a_ = add_conv("unet.up3.conv1", wb + w3, w3, 3);
  u3b_ = add_conv("unet.up3.conv2", w3, w3, 3);
  u2a_ = add_conv("unet.up2.conv1", w3 + w2, w2, 3);
  u2b_ = add_conv("unet.up2.conv2", w2, w2, 3);
  u1a_ = add_conv("unet.up1.conv1", w2 + w1, w1, 3);
  u1b_ = add_conv("unet.up1.conv2", w1, w1, 3);
  head_ = add_conv("unet.head", w1, config_.frames * config_.tile * config_.tile, 3);
}

template <typename S>
void FusionModelT<S>::init_params(uint64_t seed) {
  params_.reserve(layout_.size());
  for (size_t i = 0; i < layout_.size(); ++i) {
    const auto& [name, shape] = layout_[i];
    TensorT<S> value(shape[0], shape[1], shape[2], shape[3]);
    const bool is_weight = name.ends_with(".weight");
    if (is_weight) {
      // He fan-in scaling for the ReLU stack; biases start at zero.
      const double fan_in = static_cast<double>(shape[1]) * shape[2] * shape[3];
      const double stddev = std::sqrt(2.0 / fan_in);
      Rng rng = Rng::split(seed, 0x90de1, static_cast<uint64_t>(i));
      for (S& v : value.data) v = static_cast<S>(stddev * rng.next_gaussian());
    }
    params_.emplace_back(name, std::move(value));
  }
}

template <typename S>
std::vector<typename FusionModelT<S>::Id> FusionModelT<S>::bind(TapeT<S>& tape) const {
  std::vector<Id> ids;
  ids.reserve(params_.size());
  for (const ParamT<S>& p : params_) ids.push_back(tape.leaf(p.value));
  return ids;
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::conv_relu(TapeT<S>& tape, const std::vector<Id>& p,
                                                        const ConvRef& ref, Id x) const {
  return tape.relu(tape.conv2d(x, p[ref.weight], p[ref.bias], 1, 1));
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::encode(TapeT<S>& tape, const std::vector<Id>& p,
                                                     Id x) const {
  Id h = conv_relu(tape, p, enc1_, x);
  h = conv_relu(tape, p, enc2_, h);
  // No activation on the last encoder layer: cosine attention needs signed
  // features.
  return tape.conv2d(h, p[enc3_.weight], p[enc3_.bias], 1, 1);
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::attention(TapeT<S>& tape, Id phi_c,
                                                        Id phi_f) const {
  const Id raw = tape.cosine_channels(phi_c, phi_f);
  // (raw + 1) / 2, clamped only against rounding spill outside [0,1].
  return tape.saturate01(tape.affine(raw, S(0.5), S(0.5)));
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::fuse(TapeT<S>& tape, Id phi_c, Id phi_f,
                                                   Id att) const {
  const Id weighted_f = tape.broadcast_mul(att, phi_f);
  const Id inverse = tape.affine(att, S(-1), S(1));
  const Id weighted_c = tape.broadcast_mul(inverse, phi_c);
  return tape.concat_channels(weighted_f, weighted_c);
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::unet(TapeT<S>& tape, const std::vector<Id>& p,
                                                   Id features) const {
  const TensorT<S>& in = tape.value(features);
  if (in.h % 8 != 0 || in.w % 8 != 0) {
    throw DimensionError("unet: input spatial dims must be divisible by 8, got " +
                         in.shape_str());
  }
  const Id d1 = conv_relu(tape, p, d1b_, conv_relu(tape, p, d1a_, features));
  const Id d2 = conv_relu(tape, p, d2b_, conv_relu(tape, p, d2a_, tape.maxpool2(d1)));
  const Id d3 = conv_relu(tape, p, d3b_, conv_relu(tape, p, d3a_, tape.maxpool2(d2)));
  const Id bn = conv_relu(tape, p, bnb_, conv_relu(tape, p, bna_, tape.maxpool2(d3)));
  Id up = tape.concat_channels(tape.upsample2(bn), d3);
  up = conv_relu(tape, p, u3b_, conv_relu(tape, p, u3a_, up));
  up = tape.concat_channels(tape.upsample2(up), d2);
  up = conv_relu(tape, p, u2b_, conv_relu(tape, p, u2a_, up));
  up = tape.concat_channels(tape.upsample2(up), d1);
  up = conv_relu(tape, p, u1b_, conv_relu(tape, p, u1a_, up));
  // Linear head: the prediction needs the full output range.
  const Id head = tape.conv2d(up, p[head_.weight], p[head_.bias], 1, 1);
  return tape.subpixel_upsample(head, config_.tile);
}

template <typename S>
typename FusionModelT<S>::PairForward FusionModelT<S>::forward_pair(TapeT<S>& tape,
                                                                    const std::vector<Id>& p,
                                                                    Id xc, Id xf) const {
  if (config_.variant != ModelVariant::kPair) {
    throw UsageError("forward_pair needs a pair-variant model, this one is " +
                     variant_name(config_.variant));
  }
  const Id phi_c = encode(tape, p, xc);
  const Id phi_f = encode(tape, p, xf);
  const Id att = attention(tape, phi_c, phi_f);
  const Id fused = fuse(tape, phi_c, phi_f, att);
  PairForward result;
  result.prediction = unet(tape, p, fused);
  result.attention = att;
  return result;
}

template <typename S>
typename FusionModelT<S>::Id FusionModelT<S>::forward_single(TapeT<S>& tape,
                                                             const std::vector<Id>& p,
                                                             Id x) const {
  if (config_.variant == ModelVariant::kPair) {
    throw UsageError("forward_single needs a single-input variant, this model is pair");
  }
  return unet(tape, p, encode(tape, p, x));
}

template <typename S>
VideoCube FusionModelT<S>::predict_pair(const LowResVideo& xc, const LowResVideo& xf) const {
  TapeT<S> tape;
  const std::vector<Id> p = bind(tape);
  const Id xc_id = tape.leaf(clip_to_tensor<S>(xc));
  const Id xf_id = tape.leaf(clip_to_tensor<S>(xf));
  const PairForward fwd = forward_pair(tape, p, xc_id, xf_id);
  return tensor_to_clip<S>(tape.value(fwd.prediction), 0);
}

template <typename S>
VideoCube FusionModelT<S>::predict_single(const LowResVideo& x) const {
  TapeT<S> tape;
  const std::vector<Id> p = bind(tape);
  const Id x_id = tape.leaf(clip_to_tensor<S>(x));
  return tensor_to_clip<S>(tape.value(forward_single(tape, p, x_id)), 0);
}

template <typename S>
Image FusionModelT<S>::attention_image(const LowResVideo& xc, const LowResVideo& xf) const {
  if (config_.variant != ModelVariant::kPair) {
    throw UsageError("attention map needs a pair-variant model, this one is " +
                     variant_name(config_.variant));
  }
  TapeT<S> tape;
  const std::vector<Id> p = bind(tape);
  const Id phi_c = encode(tape, p, tape.leaf(clip_to_tensor<S>(xc)));
  const Id phi_f = encode(tape, p, tape.leaf(clip_to_tensor<S>(xf)));
  const TensorT<S>& att = tape.value(attention(tape, phi_c, phi_f));
  Image out(att.h, att.w);
  for (int y = 0; y < att.h; ++y) {
    for (int x = 0; x < att.w; ++x) out.at(y, x) = static_cast<double>(att.at(0, 0, y, x));
  }
  return out;
}

template <typename S>
TensorT<S> clip_to_tensor(const VideoCube& clip) {
  TensorT<S> out(1, clip.length(), clip.height(), clip.width());
  size_t i = 0;
  for (int t = 0; t < clip.length(); ++t) {
    for (double v : clip.frame(t).values) out.data[i++] = static_cast<S>(v);
  }
  return out;
}

template <typename S>
VideoCube tensor_to_clip(const TensorT<S>& t, int batch_index) {
  if (batch_index < 0 || batch_index >= t.b) throw DimensionError("batch index out of range");
  std::vector<Image> frames;
  frames.reserve(static_cast<size_t>(t.c));
  for (int ci = 0; ci < t.c; ++ci) {
    Image f(t.h, t.w);
    for (int y = 0; y < t.h; ++y) {
      for (int x = 0; x < t.w; ++x) {
        f.at(y, x) = clamp01(static_cast<double>(t.at(batch_index, ci, y, x)));
      }
    }
    frames.push_back(std::move(f));
  }
  return VideoCube(std::move(frames));
}

template class FusionModelT<float>;
template class FusionModelT<double>;

template TensorT<float> clip_to_tensor<float>(const VideoCube&);
template TensorT<double> clip_to_tensor<double>(const VideoCube&);
template VideoCube tensor_to_clip<float>(const TensorT<float>&, int);
template VideoCube tensor_to_clip<double>(const TensorT<double>&, int);

}  // namespace c2b

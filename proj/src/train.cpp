#include "c2b/train.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "c2b/dataset.hpp"
#include "c2b/rng.hpp"
#include "c2b/tape.hpp"

namespace c2b {

namespace {

constexpr uint64_t kShuffleKey = 0x5a0f;

struct Prepared {
  std::vector<Tensor> inputs;  // per-variant ordering from make_example
  Tensor target;
};

Tensor stack_batch(const std::vector<const Tensor*>& items) {
  const Tensor& first = *items.front();
  Tensor out(static_cast<int>(items.size()), first.c, first.h, first.w);
  const size_t per = first.data.size();
  for (size_t i = 0; i < items.size(); ++i) {
    std::copy(items[i]->data.begin(), items[i]->data.end(), out.data.begin() + i * per);
  }
  return out;
}

void check_resume(const TrainedState& resume, const ModelConfig& expected) {
  const ModelConfig& m = resume.model;
  if (m.variant != expected.variant || m.frames != expected.frames || m.tile != expected.tile ||
      m.unet_widths != expected.unet_widths || m.bottleneck != expected.bottleneck) {
    throw ConfigError("checkpoint model structure does not match the config");
  }
}

}  // namespace

TrainResult train_model(const TrainConfig& config, const ExposureCode& code,
                        const std::vector<VideoCube>& clips, const TrainedState* resume) {
  config.validate();
  if (code.tile_size() != config.code_n || code.length() != config.code_t) {
    throw ConfigError("config code dims (" + std::to_string(config.code_n) + "," +
                      std::to_string(config.code_t) + ") do not match the exposure code");
  }
  if (clips.empty()) throw ValueError("training dataset is empty");

  const TiledCode tiled = tile_code(code, config.patch, config.patch);
  std::vector<Prepared> examples;
  for (const VideoCube& clip : clips) {
    if (clip.length() != config.code_t) {
      throw DimensionError("training clip has " + std::to_string(clip.length()) +
                           " frames, expected " + std::to_string(config.code_t));
    }
    for (const VideoCube& patch : extract_patches(clip, config.patch)) {
      TrainExample ex = make_example(patch, tiled, config.variant);
      Prepared p;
      p.inputs.reserve(ex.inputs.size());
      for (const LowResVideo& in : ex.inputs) p.inputs.push_back(clip_to_tensor<float>(in));
      p.target = clip_to_tensor<float>(ex.target);
      examples.push_back(std::move(p));
    }
  }

  const int64_t steps_per_epoch = static_cast<int64_t>(examples.size()) / config.batch;
  if (steps_per_epoch == 0) {
    throw ConfigError("batch " + std::to_string(config.batch) + " exceeds the " +
                      std::to_string(examples.size()) + " available patches");
  }

  const ModelConfig model_cfg = config.model_config();
  if (resume != nullptr) check_resume(*resume, model_cfg);
  FusionModel model =
      resume != nullptr ? resume->make_model() : FusionModel(model_cfg, config.seed);
  AdamConfigT<float> adam_cfg;
  adam_cfg.lr = static_cast<float>(config.lr);
  Adam opt = resume != nullptr ? resume->make_optimizer() : Adam(adam_cfg, model.params());

  const float lambda = static_cast<float>(config.lambda);
  const int num_inputs = config.variant == ModelVariant::kPair ? 2 : 1;

  TrainResult result;
  result.history.reserve(64);
  int64_t step = opt.steps();
  std::vector<size_t> order(examples.size());

  for (int64_t epoch = step / steps_per_epoch; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng shuffle_rng = Rng::split(config.seed, kShuffleKey, static_cast<uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    for (int64_t b = step % steps_per_epoch; b < steps_per_epoch; ++b) {
      if (config.max_steps > 0 && step >= config.max_steps) {
        result.state = capture_state(model, opt, format_code_text(code));
        return result;
      }

      std::vector<std::vector<const Tensor*>> slots(num_inputs);
      std::vector<const Tensor*> targets;
      for (int k = 0; k < config.batch; ++k) {
        const Prepared& ex = examples[order[b * config.batch + k]];
        for (int s = 0; s < num_inputs; ++s) slots[s].push_back(&ex.inputs[s]);
        targets.push_back(&ex.target);
      }

      for (const Param& prm : model.params()) {
        if (!prm.value.all_finite()) {
          throw NumericError("non-finite parameters entering step " + std::to_string(step + 1));
        }
      }

      Tape tape;
      const std::vector<Tape::Id> p = model.bind(tape);
      Tape::Id pred = 0;
      if (config.variant == ModelVariant::kPair) {
        const Tape::Id xc = tape.leaf(stack_batch(slots[0]));
        const Tape::Id xf = tape.leaf(stack_batch(slots[1]));
        pred = model.forward_pair(tape, p, xc, xf).prediction;
      } else {
        const Tape::Id x = tape.leaf(stack_batch(slots[0]));
        pred = model.forward_single(tape, p, x);
      }
      const Tape::Id target = tape.leaf(stack_batch(targets));
      const Tape::Id data_term = tape.l1_loss(pred, target);
      const Tape::Id smooth_term = tape.tv_l1(pred);
      const Tape::Id total = tape.scale_add(data_term, 1.0f, smooth_term, lambda);

      const double total_v = tape.value(total).data[0];
      if (!std::isfinite(total_v)) {
        throw NumericError("non-finite loss at step " + std::to_string(step + 1));
      }
      tape.backward(total);

      std::vector<Param>& params = model.params();
      for (size_t i = 0; i < params.size(); ++i) params[i].grad = tape.grad(p[i]);
      opt.step(params);

      ++step;
      result.history.push_back(StepLoss{step, total_v,
                                        static_cast<double>(tape.value(data_term).data[0]),
                                        static_cast<double>(tape.value(smooth_term).data[0])});
    }
  }

  result.state = capture_state(model, opt, format_code_text(code));
  return result;
}

}  // namespace c2b

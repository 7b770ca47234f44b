#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cstdint>

#include "c2b/synth.hpp"
#include "c2b/tape.hpp"
#include "c2b/train.hpp"
#include "helpers.hpp"

using namespace c2b;
using namespace c2b::testing;

namespace {

// Tiny desk setup: four 24x24x9 clips, one patch each, two-example batches.
TrainConfig tiny_config(ModelVariant variant = ModelVariant::kPair) {
  TrainConfig cfg;
  cfg.seed = 5;
  cfg.variant = variant;
  cfg.unet_widths = {4, 6, 8};
  cfg.bottleneck = 12;
  cfg.lr = 1e-3;
  cfg.epochs = 3;
  cfg.batch = 2;
  cfg.patch = 24;
  return cfg;
}

std::vector<VideoCube> tiny_clips() {
  SynthSpec spec;
  spec.count = 4;
  spec.height = 24;
  spec.width = 24;
  spec.rect_h = 8;
  spec.rect_w = 8;
  spec.vx = 1;
  return synth_dataset(spec, 17);
}

bool bits_equal(const Tensor& a, const Tensor& b) {
  if (a.data.size() != b.data.size()) return false;
  for (size_t i = 0; i < a.data.size(); ++i) {
    if (std::bit_cast<uint32_t>(a.data[i]) != std::bit_cast<uint32_t>(b.data[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("history covers epochs * steps_per_epoch steps, numbered from one") {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  const TrainResult r = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
  REQUIRE(r.history.size() == 4);  // 4 patches / batch 2 = 2 steps per epoch
  for (size_t i = 0; i < r.history.size(); ++i) {
    CHECK(r.history[i].step == static_cast<int64_t>(i + 1));
  }
  CHECK(r.state.step == 4);
  CHECK(r.state.make_optimizer().steps() == 4);
}

TEST_CASE("max_steps caps the run mid-epoch") {
  TrainConfig cfg = tiny_config();
  cfg.max_steps = 3;
  const TrainResult r = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
  REQUIRE(r.history.size() == 3);
  CHECK(r.history.back().step == 3);
  CHECK(r.state.step == 3);
}

TEST_CASE("reported loss is exactly the tape's data + lambda * smoothness") {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  cfg.lambda = 0.1;
  const TrainResult r = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
  REQUIRE(!r.history.empty());
  const float lambda = static_cast<float>(cfg.lambda);
  for (const StepLoss& h : r.history) {
    CHECK(h.total >= 0.0);
    CHECK(h.data_term >= 0.0);
    CHECK(h.smooth_term >= 0.0);
    Tape tape;
    const Tape::Id d = tape.leaf(Tensor(1, 1, 1, 1, static_cast<float>(h.data_term)));
    const Tape::Id s = tape.leaf(Tensor(1, 1, 1, 1, static_cast<float>(h.smooth_term)));
    const Tape::Id total = tape.scale_add(d, 1.0f, s, lambda);
    CHECK(h.total == static_cast<double>(tape.value(total).data[0]));
  }
}

TEST_CASE("objective at a perfect fit reduces to the smoothness term") {
  const VideoCube clip = tiny_clips()[0];
  Tape tape;
  const Tape::Id pred = tape.leaf(clip_to_tensor<float>(clip));
  const Tape::Id target = tape.leaf(clip_to_tensor<float>(clip));
  const Tape::Id data = tape.l1_loss(pred, target);
  const Tape::Id smooth = tape.tv_l1(pred);
  const Tape::Id total = tape.scale_add(data, 1.0f, smooth, 0.1f);
  CHECK(tape.value(data).data[0] == 0.0f);
  CHECK(tape.value(total).data[0] == 0.1f * tape.value(smooth).data[0]);
}

TEST_CASE("equal seeds give bit-identical histories and parameters") {
  const TrainConfig cfg = tiny_config();
  const TrainResult a = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
  const TrainResult b = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
  REQUIRE(a.history.size() == b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].step == b.history[i].step);
    CHECK(a.history[i].total == b.history[i].total);
    CHECK(a.history[i].data_term == b.history[i].data_term);
    CHECK(a.history[i].smooth_term == b.history[i].smooth_term);
  }
  REQUIRE(a.state.params.size() == b.state.params.size());
  for (size_t i = 0; i < a.state.params.size(); ++i) {
    CHECK(bits_equal(a.state.params[i].value, b.state.params[i].value));
  }

  TrainConfig other = cfg;
  other.seed = 6;
  const TrainResult c = train_model(other, make_impulse_code(3, 9), tiny_clips());
  CHECK(a.history.front().total != c.history.front().total);
}

TEST_CASE("resuming replays the uninterrupted trace") {
  const std::vector<VideoCube> clips = tiny_clips();
  const ExposureCode code = make_impulse_code(3, 9);

  const TrainConfig cfg = tiny_config();  // 3 epochs * 2 steps = 6 steps
  const TrainResult full = train_model(cfg, code, clips);
  REQUIRE(full.history.size() == 6);

  TrainConfig capped = cfg;
  capped.max_steps = 3;  // stops mid-epoch
  const TrainResult half = train_model(capped, code, clips);
  REQUIRE(half.history.size() == 3);
  const TrainResult rest = train_model(cfg, code, clips, &half.state);
  REQUIRE(rest.history.size() == 3);

  for (size_t i = 0; i < 3; ++i) {
    const StepLoss& expect = full.history[3 + i];
    const StepLoss& got = rest.history[i];
    CHECK(got.step == expect.step);
    CHECK(got.total == expect.total);
    CHECK(got.data_term == expect.data_term);
    CHECK(got.smooth_term == expect.smooth_term);
  }
  for (size_t i = 0; i < full.state.params.size(); ++i) {
    CHECK(bits_equal(rest.state.params[i].value, full.state.params[i].value));
    CHECK(bits_equal(rest.state.adam_m[i], full.state.adam_m[i]));
    CHECK(bits_equal(rest.state.adam_v[i], full.state.adam_v[i]));
  }

  // A fully trained state resumes into a no-op.
  const TrainResult done = train_model(cfg, code, clips, &full.state);
  CHECK(done.history.empty());
  CHECK(done.state.step == 6);
}

TEST_CASE("single-input variants train end to end") {
  for (const ModelVariant v : {ModelVariant::kCoded, ModelVariant::kBlurred}) {
    TrainConfig cfg = tiny_config(v);
    cfg.epochs = 1;
    const TrainResult r = train_model(cfg, make_impulse_code(3, 9), tiny_clips());
    CHECK(r.history.size() == 2);
    CHECK(std::isfinite(r.history.back().total));
  }
}

TEST_CASE("bad inputs are rejected") {
  const ExposureCode code = make_impulse_code(3, 9);
  SUBCASE("empty dataset") {
    CHECK_THROWS_WITH_AS(train_model(tiny_config(), code, {}),
                         doctest::Contains("empty"), ValueError);
  }
  SUBCASE("batch larger than the example count") {
    TrainConfig cfg = tiny_config();
    cfg.batch = 64;
    CHECK_THROWS_AS(train_model(cfg, code, tiny_clips()), ConfigError);
  }
  SUBCASE("config code dims must match the code") {
    TrainConfig cfg = tiny_config();
    cfg.code_n = 2;
    cfg.code_t = 4;
    cfg.patch = 48;
    CHECK_THROWS_AS(train_model(cfg, code, tiny_clips()), ConfigError);
  }
  SUBCASE("clip frame count must match the code length") {
    SynthSpec spec;
    spec.count = 4;
    spec.height = 24;
    spec.width = 24;
    spec.rect_h = 8;
    spec.rect_w = 8;
    spec.frames = 7;
    CHECK_THROWS_AS(train_model(tiny_config(), code, synth_dataset(spec, 1)), DimensionError);
  }
  SUBCASE("checkpoint structure must match the config") {
    const TrainConfig cfg = tiny_config();
    TrainConfig capped = cfg;
    capped.max_steps = 1;
    const TrainResult half = train_model(capped, code, tiny_clips());
    TrainConfig other = cfg;
    other.bottleneck = 16;
    CHECK_THROWS_AS(train_model(other, code, tiny_clips(), &half.state), ConfigError);
  }
}

TEST_CASE("a runaway step size aborts with a diagnostic") {
  TrainConfig cfg = tiny_config();
  cfg.lr = 1e30;
  cfg.epochs = 5;
  CHECK_THROWS_AS(train_model(cfg, make_impulse_code(3, 9), tiny_clips()), NumericError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "c2b/dataset.hpp"
#include "c2b/image_io.hpp"
#include "c2b/lowres.hpp"
#include "helpers.hpp"

using namespace c2b;
using namespace c2b::testing;

namespace {

std::vector<Image> numbered_frames(int count, int h = 6, int w = 6) {
  std::vector<Image> frames;
  frames.reserve(count);
  for (int i = 0; i < count; ++i) {
    frames.emplace_back(h, w, static_cast<double>(i) / count);
  }
  return frames;
}

}  // namespace

TEST_CASE("window_clips counts and contents") {
  CHECK(window_clips(numbered_frames(9), 9).size() == 1);
  CHECK(window_clips(numbered_frames(27), 9).size() == 3);
  CHECK(window_clips(numbered_frames(500), 9).size() == 55);
  CHECK(window_clips(numbered_frames(17), 9).size() == 1);  // remainder dropped

  const std::vector<VideoCube> overlapping = window_clips(numbered_frames(11), 9, 1);
  REQUIRE(overlapping.size() == 3);
  for (size_t i = 0; i < overlapping.size(); ++i) {
    for (int t = 0; t < 9; ++t) {
      CHECK(overlapping[i].at(0, 0, t) == static_cast<double>(i + t) / 11);
    }
  }
}

TEST_CASE("window_clips rejects bad arguments") {
  CHECK_THROWS_AS(window_clips(numbered_frames(8), 9), DimensionError);
  CHECK_THROWS_AS(window_clips(numbered_frames(9), 0), ValueError);
  CHECK_THROWS_AS(window_clips(numbered_frames(9), 9, -1), ValueError);
}

TEST_CASE("extract_patches tiles non-overlapping crops and drops remainders") {
  CHECK(extract_patches(make_constant_video(720, 1280, 2, 0.5), 240).size() == 15);
  CHECK(extract_patches(make_constant_video(7, 7, 2, 0.5), 3).size() == 4);

  const VideoCube clip = make_random_video(72, 72, 9, 31);
  const std::vector<VideoCube> identity = extract_patches(clip, 72);
  REQUIRE(identity.size() == 1);
  for (int t = 0; t < 9; ++t) CHECK(identity[0].frame(t).values == clip.frame(t).values);
}

TEST_CASE("extract_patches crops every frame identically") {
  const VideoCube clip = make_random_video(6, 9, 2, 7);
  const std::vector<VideoCube> patches = extract_patches(clip, 3);
  REQUIRE(patches.size() == 6);  // 2 rows x 3 cols
  for (int py = 0; py < 2; ++py) {
    for (int px = 0; px < 3; ++px) {
      const VideoCube& patch = patches[py * 3 + px];
      CHECK(patch.height() == 3);
      CHECK(patch.width() == 3);
      CHECK(patch.length() == 2);
      for (int t = 0; t < 2; ++t) {
        for (int y = 0; y < 3; ++y) {
          for (int x = 0; x < 3; ++x) {
            CHECK(patch.at(y, x, t) == clip.at(py * 3 + y, px * 3 + x, t));
          }
        }
      }
    }
  }
}

TEST_CASE("extract_patches rejects oversized patches") {
  CHECK_THROWS_AS(extract_patches(make_constant_video(6, 6, 2, 0.5), 7), DimensionError);
  CHECK_THROWS_AS(extract_patches(make_constant_video(6, 6, 2, 0.5), 0), ValueError);
}

TEST_CASE("make_example matches hand-composed simulation calls") {
  const VideoCube clip = make_random_video(12, 12, 9, 13);
  const TiledCode code = tile_code(make_impulse_code(3, 9), 12, 12);

  const TrainExample pair = make_example(clip, code, ModelVariant::kPair);
  REQUIRE(pair.inputs.size() == 2);
  const LowResVideo xc = recover_lowres_coded(encode_coded(clip, code), code);
  const LowResVideo xf = pixel_shuffle_image(encode_blurred(clip), 3);
  for (int t = 0; t < 9; ++t) {
    CHECK(pair.inputs[0].frame(t).values == xc.frame(t).values);
    CHECK(pair.inputs[1].frame(t).values == xf.frame(t).values);
    CHECK(pair.target.frame(t).values == clip.frame(t).values);
  }

  const TrainExample coded = make_example(clip, code, ModelVariant::kCoded);
  REQUIRE(coded.inputs.size() == 1);
  CHECK(coded.inputs[0].frame(4).values == xc.frame(4).values);

  const TrainExample blurred = make_example(clip, code, ModelVariant::kBlurred);
  REQUIRE(blurred.inputs.size() == 1);
  CHECK(blurred.inputs[0].frame(4).values == xf.frame(4).values);
}

TEST_CASE("make_example on a static clip gives identical coded and blurred inputs") {
  const Image still = make_random_image(12, 12, 77);
  const VideoCube clip(std::vector<Image>(9, still));
  const TiledCode code = tile_code(make_impulse_code(3, 9), 12, 12);
  const TrainExample ex = make_example(clip, code, ModelVariant::kPair);
  for (int t = 0; t < 9; ++t) {
    CHECK(ex.inputs[0].frame(t).values == ex.inputs[1].frame(t).values);
  }
}

TEST_CASE("make_example rejects mismatched code cover") {
  const VideoCube clip = make_constant_video(12, 12, 9, 0.5);
  const TiledCode code = tile_code(make_impulse_code(3, 9), 9, 9);
  CHECK_THROWS_AS(make_example(clip, code, ModelVariant::kPair), DimensionError);
}

TEST_CASE("load_clip_directory accepts a flat directory of frames") {
  TempDir dir("clips_flat");
  write_frames(make_constant_video(6, 6, 18, 0.5), dir.str());
  const std::vector<VideoCube> clips = load_clip_directory(dir.str(), 9);
  CHECK(clips.size() == 2);
  CHECK(clips[0].height() == 6);
}

TEST_CASE("load_clip_directory walks subdirectories in name order") {
  TempDir dir("clips_tree");
  std::filesystem::create_directories(dir.sub("b_second"));
  std::filesystem::create_directories(dir.sub("a_first"));
  write_frames(make_constant_video(6, 6, 9, 0.8), dir.sub("b_second"));
  write_frames(make_constant_video(6, 6, 9, 0.2), dir.sub("a_first"));
  const std::vector<VideoCube> clips = load_clip_directory(dir.str(), 9);
  REQUIRE(clips.size() == 2);
  CHECK(clips[0].at(0, 0, 0) < 0.5);  // a_first loads before b_second
  CHECK(clips[1].at(0, 0, 0) > 0.5);
}

TEST_CASE("load_clip_directory rejects a missing path") {
  TempDir dir("clips_missing");
  CHECK_THROWS_AS(load_clip_directory(dir.sub("absent"), 9), IoError);
}

TEST_CASE("split_by_parity sends even indices to train") {
  std::vector<VideoCube> clips;
  for (int i = 0; i < 5; ++i) clips.push_back(make_constant_video(3, 3, 2, 0.1 * (i + 1)));
  const DatasetSplit split = split_by_parity(clips);
  REQUIRE(split.train.size() == 3);
  REQUIRE(split.val.size() == 2);
  CHECK(split.train[0].at(0, 0, 0) == doctest::Approx(0.1));
  CHECK(split.train[1].at(0, 0, 0) == doctest::Approx(0.3));
  CHECK(split.train[2].at(0, 0, 0) == doctest::Approx(0.5));
  CHECK(split.val[0].at(0, 0, 0) == doctest::Approx(0.2));
  CHECK(split.val[1].at(0, 0, 0) == doctest::Approx(0.4));
}

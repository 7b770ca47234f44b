#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>
#include <vector>

#include "c2b/code.hpp"
#include "c2b/image_io.hpp"
#include "c2b/imaging.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace c2b;
using namespace c2b::testing;

namespace {

// Non-impulse code with activations strictly between 1 and T-1: position i is
// exposed at frame t when (i + t) is even.
ExposureCode parity_code(int n, int t_len) {
  std::vector<uint8_t> mask(static_cast<size_t>(n) * n * t_len);
  for (int t = 0; t < t_len; ++t) {
    for (int i = 0; i < n * n; ++i) {
      mask[static_cast<size_t>(t) * n * n + i] = (i + t) % 2 == 0 ? 1 : 0;
    }
  }
  return ExposureCode(n, t_len, std::move(mask));
}

VideoCube blend(const VideoCube& a, const VideoCube& b, double alpha, double beta) {
  std::vector<Image> frames;
  for (int t = 0; t < a.length(); ++t) {
    Image f(a.height(), a.width());
    for (size_t i = 0; i < f.values.size(); ++i) {
      f.values[i] = alpha * a.frame(t).values[i] + beta * b.frame(t).values[i];
    }
    frames.push_back(std::move(f));
  }
  return VideoCube(std::move(frames));
}

}  // namespace

TEST_CASE("impulse code visits raster positions in order") {
  const ExposureCode code = make_impulse_code(3, 9);
  for (int t = 0; t < 9; ++t) {
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        const uint8_t expected = (y == t / 3 && x == t % 3) ? 1 : 0;
        CHECK_EQ(code.at(y, x, t), expected);
      }
    }
  }
  CHECK(code.is_impulse());
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 3; ++x) CHECK_EQ(code.activation(y, x), 1);
  }
}

TEST_CASE("impulse code edge sizes") {
  const ExposureCode one = make_impulse_code(1, 1);
  CHECK_EQ(one.at(0, 0, 0), 1);
  CHECK(one.is_impulse());

  const ExposureCode two = make_impulse_code(2, 4);
  // Active positions per frame in raster order: (0,0),(0,1),(1,0),(1,1).
  for (int t = 0; t < 4; ++t) {
    int active = 0;
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        if (two.at(y, x, t)) {
          ++active;
          CHECK_EQ(y, t / 2);
          CHECK_EQ(x, t % 2);
        }
      }
    }
    CHECK_EQ(active, 1);
  }
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) CHECK_EQ(two.activation(y, x), 1);
  }
}

TEST_CASE("impulse code rejects T != N*N") {
  CHECK_THROWS_AS(make_impulse_code(3, 8), DimensionError);
  CHECK_THROWS_AS(make_impulse_code(2, 9), DimensionError);
}

TEST_CASE("exposure code construction validates entries") {
  CHECK_THROWS_AS(ExposureCode(2, 1, {1, 1, 1, 0}), DegenerateCodeError);
  CHECK_THROWS_AS(ExposureCode(1, 2, {1, 2}), ValueError);
  CHECK_THROWS_AS(ExposureCode(2, 2, {1, 1, 1}), DimensionError);
  CHECK_THROWS_AS(ExposureCode(0, 1, {}), DimensionError);
}

TEST_CASE("tile_code repeats the base code spatially") {
  const ExposureCode base = make_impulse_code(3, 9);
  const TiledCode tiled = tile_code(base, 6, 6);
  for (int t = 0; t < 9; ++t) {
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) {
        CHECK_EQ(tiled.at(y, x, t), base.at(y % 3, x % 3, t));
      }
    }
  }

  const TiledCode same = tile_code(base, 3, 3);
  for (int t = 0; t < 9; ++t) {
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) CHECK_EQ(same.at(y, x, t), base.at(y, x, t));
    }
  }

  const TiledCode big = tile_code(base, 240, 240);
  long long total = 0;
  for (int t = 0; t < 9; ++t) {
    for (int y = 0; y < 240; ++y) {
      for (int x = 0; x < 240; ++x) total += big.at(y, x, t);
    }
  }
  CHECK_EQ(total, 240LL * 240LL);

  CHECK_THROWS_AS(tile_code(base, 7, 6), DimensionError);
  CHECK_THROWS_AS(tile_code(base, 6, 8), DimensionError);
}

TEST_CASE("encode_coded on constant videos") {
  const VideoCube video = make_constant_video(6, 6, 9, 0.6);
  const CodedImage coded = encode_coded(video, tile_code(make_impulse_code(3, 9), 6, 6));
  for (double v : coded.values.values) CHECK_EQ(v, doctest::Approx(0.6).epsilon(1e-12));

  // An all-open code is fine for single-bucket encoding: the sum T*c divided
  // by activation T is c again.
  const ExposureCode all_on(2, 3, std::vector<uint8_t>(12, 1));
  const VideoCube quarter = make_constant_video(4, 4, 3, 0.25);
  const CodedImage averaged = encode_coded(quarter, tile_code(all_on, 4, 4));
  for (double v : averaged.values.values) CHECK_EQ(v, doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("encode_coded matches the brute-force forward model") {
  const VideoCube video = make_random_video(6, 6, 9, 41);
  for (const ExposureCode& base : {make_impulse_code(3, 9), parity_code(3, 9)}) {
    const TiledCode code = tile_code(base, 6, 6);
    const CodedImage coded = encode_coded(video, code);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) {
        double sum = 0.0;
        int act = 0;
        for (int t = 0; t < 9; ++t) {
          if (code.at(y, x, t)) {
            sum += video.at(y, x, t);
            ++act;
          }
        }
        CHECK_EQ(coded.activation_at(y, x), act);
        CHECK(std::abs(coded.values.at(y, x) - sum / act) <= 1e-12);
      }
    }
  }
}

TEST_CASE("encode_coded is linear in the video") {
  const VideoCube a = make_random_video(6, 6, 9, 7);
  const VideoCube b = make_random_video(6, 6, 9, 8);
  const TiledCode code = tile_code(parity_code(3, 9), 6, 6);
  const CodedImage enc_blend = encode_coded(blend(a, b, 0.4, 0.5), code);
  const CodedImage enc_a = encode_coded(a, code);
  const CodedImage enc_b = encode_coded(b, code);
  for (size_t i = 0; i < enc_blend.values.values.size(); ++i) {
    const double expected = 0.4 * enc_a.values.values[i] + 0.5 * enc_b.values.values[i];
    CHECK(std::abs(enc_blend.values.values[i] - expected) <= 1e-6);
  }
}

TEST_CASE("encode_coded rejects mismatched dimensions") {
  const TiledCode code = tile_code(make_impulse_code(3, 9), 3, 3);
  CHECK_THROWS_AS(encode_coded(make_random_video(6, 6, 9, 1), code), DimensionError);
  CHECK_THROWS_AS(encode_coded(make_random_video(3, 3, 8, 1), code), DimensionError);
}

TEST_CASE("encode_blurred is the temporal mean") {
  const FullyExposedImage flat = encode_blurred(make_constant_video(4, 5, 7, 0.3));
  for (double v : flat.values.values) CHECK_EQ(v, doctest::Approx(0.3).epsilon(1e-12));

  const VideoCube single = make_random_video(5, 4, 1, 11);
  const FullyExposedImage same = encode_blurred(single);
  CHECK_EQ(max_abs_diff(same.values, single.frame(0)), 0.0);

  const VideoCube video = make_random_video(6, 6, 9, 12);
  const FullyExposedImage blurred = encode_blurred(video);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      double sum = 0.0;
      for (int t = 0; t < 9; ++t) sum += video.at(y, x, t);
      CHECK(std::abs(blurred.values.at(y, x) - sum / 9.0) <= 1e-12);
    }
  }
}

TEST_CASE("encode_two_bucket complements the code") {
  const TiledCode code = tile_code(make_impulse_code(3, 9), 6, 6);
  const VideoCube video = make_random_video(6, 6, 9, 21);
  const BucketPair pair = encode_two_bucket(video, code);
  CHECK_EQ(pair.length, 9);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      CHECK_EQ(pair.bucket1.activation_at(y, x), 1);
      CHECK_EQ(pair.bucket0.activation_at(y, x), 8);
    }
  }

  const BucketPair flat = encode_two_bucket(make_constant_video(6, 6, 9, 0.45), code);
  for (double v : flat.bucket1.values.values) CHECK_EQ(v, doctest::Approx(0.45).epsilon(1e-12));
  for (double v : flat.bucket0.values.values) CHECK_EQ(v, doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("activation-weighted bucket sum equals T times the blurred image") {
  const VideoCube video = make_random_video(6, 6, 9, 31);
  const FullyExposedImage blurred = encode_blurred(video);
  for (const ExposureCode& base : {make_impulse_code(3, 9), parity_code(3, 9)}) {
    const BucketPair pair = encode_two_bucket(video, tile_code(base, 6, 6));
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) {
        const double weighted = pair.bucket1.activation_at(y, x) * pair.bucket1.values.at(y, x) +
                                pair.bucket0.activation_at(y, x) * pair.bucket0.values.at(y, x);
        CHECK(std::abs(weighted - 9.0 * blurred.values.at(y, x)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("encode_two_bucket rejects always-exposed pixels") {
  const ExposureCode all_on(2, 3, std::vector<uint8_t>(12, 1));
  const TiledCode code = tile_code(all_on, 4, 4);
  CHECK_THROWS_AS(encode_two_bucket(make_constant_video(4, 4, 3, 0.5), code),
                  DegenerateCodeError);
}

TEST_CASE("buckets_to_blurred reconstructs the fully exposed image") {
  const TiledCode code = tile_code(make_impulse_code(3, 9), 6, 6);
  const BucketPair flat = encode_two_bucket(make_constant_video(6, 6, 9, 0.7), code);
  const FullyExposedImage from_flat = buckets_to_blurred(flat);
  for (double v : from_flat.values.values) CHECK_EQ(v, doctest::Approx(0.7).epsilon(1e-12));

  const VideoCube video = make_random_video(6, 6, 9, 51);
  const FullyExposedImage direct = encode_blurred(video);
  const FullyExposedImage from_pair = buckets_to_blurred(encode_two_bucket(video, code));
  CHECK(max_abs_diff(direct.values, from_pair.values) <= 1e-6);

  // Two frames, one pixel, code [1, 0]: the buckets split the frames and the
  // blurred image is their mean.
  const ExposureCode split(1, 2, {1, 0});
  std::vector<Image> frames{make_constant_image(1, 1, 0.3), make_constant_image(1, 1, 0.7)};
  const BucketPair pair = encode_two_bucket(VideoCube(std::move(frames)), tile_code(split, 1, 1));
  CHECK_EQ(pair.bucket1.values.at(0, 0), doctest::Approx(0.3).epsilon(1e-12));
  CHECK_EQ(pair.bucket0.values.at(0, 0), doctest::Approx(0.7).epsilon(1e-12));
  CHECK_EQ(buckets_to_blurred(pair).values.at(0, 0), doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("encoders preserve the unit range") {
  const VideoCube video = make_random_video(12, 12, 9, 61);
  const TiledCode code = tile_code(parity_code(3, 9), 12, 12);
  CHECK(finite_unit_range(encode_coded(video, code).values));
  CHECK(finite_unit_range(encode_blurred(video).values));
  const BucketPair pair = encode_two_bucket(video, code);
  CHECK(finite_unit_range(pair.bucket1.values));
  CHECK(finite_unit_range(pair.bucket0.values));
}

TEST_CASE("code text round trip") {
  const ExposureCode code = make_impulse_code(3, 9);
  const std::string text = format_code_text(code);
  CHECK_EQ(text.substr(0, 4), "3 9\n");
  std::istringstream in(text);
  const ExposureCode parsed = read_code_text(in);
  CHECK_EQ(parsed.tile_size(), 3);
  CHECK_EQ(parsed.length(), 9);
  CHECK(parsed.mask() == code.mask());
}

TEST_CASE("code text parser rejects malformed input") {
  std::istringstream truncated("3 9\n1 0 0\n0 1 0\n");
  CHECK_THROWS_AS(read_code_text(truncated), IoError);
  std::istringstream nonbinary("1 2\n1\n2\n");
  CHECK_THROWS_AS(read_code_text(nonbinary), IoError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_code_text(empty), IoError);
}

TEST_CASE("code file round trip") {
  const TempDir dir("code");
  const std::string path = dir.sub("impulse.txt");
  const ExposureCode code = make_impulse_code(2, 4);
  write_code_file(code, path);
  const ExposureCode loaded = read_code_file(path);
  CHECK(loaded.mask() == code.mask());
  CHECK_THROWS_AS(read_code_file(dir.sub("missing.txt")), IoError);
}

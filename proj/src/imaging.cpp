#include "c2b/imaging.hpp"

#include <cmath>

namespace c2b {

namespace {

void check_dims(const VideoCube& video, const TiledCode& code) {
  if (video.height() != code.height() || video.width() != code.width() ||
      video.length() != code.length()) {
    throw DimensionError("video dimensions must match the tiled code");
  }
}

}  // namespace

CodedImage encode_coded(const VideoCube& video, const TiledCode& code) {
  check_dims(video, code);
  const int h = video.height();
  const int w = video.width();
  CodedImage out;
  out.values = Image(h, w);
  out.activation.assign(static_cast<size_t>(h) * w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Running mean: averaging identical samples reproduces them exactly,
      // which keeps static scenes bit-stable through the simulation.
      double mean = 0.0;
      int seen = 0;
      for (int t = 0; t < code.length(); ++t) {
        if (code.at(y, x, t)) mean += (video.at(y, x, t) - mean) / ++seen;
      }
      out.activation[static_cast<size_t>(y) * w + x] = seen;
      out.values.at(y, x) = mean;
    }
  }
  return out;
}

FullyExposedImage encode_blurred(const VideoCube& video) {
  const int h = video.height();
  const int w = video.width();
  const int t_len = video.length();
  FullyExposedImage out;
  out.values = Image(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int t = 0; t < t_len; ++t) mean += (video.at(y, x, t) - mean) / (t + 1);
      out.values.at(y, x) = mean;
    }
  }
  return out;
}

BucketPair encode_two_bucket(const VideoCube& video, const TiledCode& code) {
  check_dims(video, code);
  const ExposureCode& base = code.base();
  const int n = base.tile_size();
  const int t_len = base.length();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (base.activation(y, x) == t_len) {
        throw DegenerateCodeError(
            "two-bucket acquisition needs every pixel dark in some sub-exposure");
      }
    }
  }
  std::vector<uint8_t> complement(base.mask().size());
  for (size_t i = 0; i < complement.size(); ++i) complement[i] = 1 - base.mask()[i];
  const TiledCode inverse_code(ExposureCode(n, t_len, std::move(complement)),
                               code.height(), code.width());
  BucketPair pair;
  pair.bucket1 = encode_coded(video, code);
  pair.bucket0 = encode_coded(video, inverse_code);
  pair.length = t_len;
  return pair;
}

FullyExposedImage buckets_to_blurred(const BucketPair& pair) {
  const int h = pair.bucket1.height();
  const int w = pair.bucket1.width();
  FullyExposedImage out;
  out.values = Image(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double sum = pair.bucket1.activation_at(y, x) * pair.bucket1.values.at(y, x) +
                         pair.bucket0.activation_at(y, x) * pair.bucket0.values.at(y, x);
      out.values.at(y, x) = sum / pair.length;
    }
  }
  return out;
}

}  // namespace c2b

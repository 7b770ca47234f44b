#pragma once

#include <vector>

#include "c2b/code.hpp"
#include "c2b/image.hpp"

namespace c2b {

// Coded exposure observation. `values` holds the per-pixel mean of the
// active sub-exposures, so it stays in [0,1] regardless of how many
// sub-exposures each pixel integrates.
struct CodedImage {
  Image values;
  std::vector<int> activation;  // row-major H x W, each >= 1

  int height() const { return values.height; }
  int width() const { return values.width; }
  int activation_at(int y, int x) const {
    return activation[static_cast<size_t>(y) * values.width + x];
  }
};

// Fully exposed observation: temporal mean of all sub-exposures.
struct FullyExposedImage {
  Image values;

  int height() const { return values.height; }
  int width() const { return values.width; }
};

// Two-bucket acquisition: bucket1 coded with C, bucket0 with its complement.
// Per pixel, activation1 + activation0 = T.
struct BucketPair {
  CodedImage bucket1;
  CodedImage bucket0;
  int length = 0;
};

CodedImage encode_coded(const VideoCube& video, const TiledCode& code);
FullyExposedImage encode_blurred(const VideoCube& video);
BucketPair encode_two_bucket(const VideoCube& video, const TiledCode& code);
FullyExposedImage buckets_to_blurred(const BucketPair& pair);

}  // namespace c2b

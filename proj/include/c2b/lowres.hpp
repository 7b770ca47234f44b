#pragma once

#include <Eigen/Dense>
#include <vector>

#include "c2b/code.hpp"
#include "c2b/image.hpp"
#include "c2b/imaging.hpp"

namespace c2b {

// Per-tile linear system under the uniform-intensity assumption. Row i of M
// is flattened tile position i (raster order), column t is the sub-exposure:
// M(i,t) = base mask at position i, frame t. The unnormalized coded tile y
// (values times activation) satisfies y = M x for the tile's temporal
// intensities x, so recovery is x = M^-1 y.
struct TileSystem {
  int tile_size = 0;
  int length = 0;
  Eigen::MatrixXd inverse;        // T x T, empty when the fast path applies
  std::vector<int> permutation;   // x[t] = y[permutation[t]] when M is a permutation

  bool is_permutation() const { return !permutation.empty(); }
};

// Requires T = N^2 and an invertible system; the impulse code reduces to a
// permutation and skips factorization entirely.
TileSystem build_tile_system(const ExposureCode& code);

LowResVideo recover_lowres_coded(const CodedImage& coded, const TiledCode& code);

// Rearranges each N x N tile into a 1 x 1 x T temporal vector; frame t reads
// the tile pixel at raster position t, matching the impulse code ordering.
LowResVideo pixel_shuffle_image(const FullyExposedImage& blurred, int tile_size);
FullyExposedImage inverse_pixel_shuffle(const LowResVideo& video, int tile_size);

}  // namespace c2b

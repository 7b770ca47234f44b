#include "c2b/lowres.hpp"

#include <cmath>

namespace c2b {

namespace {

// Returns column -> row map when M is a permutation matrix, else empty.
std::vector<int> permutation_of(const ExposureCode& code) {
  const int n = code.tile_size();
  const int t_len = code.length();
  std::vector<int> perm(t_len, -1);
  std::vector<int> row_hits(static_cast<size_t>(n) * n, 0);
  for (int t = 0; t < t_len; ++t) {
    int hits = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (code.at(y, x, t)) {
          ++hits;
          perm[t] = y * n + x;
          ++row_hits[static_cast<size_t>(y) * n + x];
        }
      }
    }
    if (hits != 1) return {};
  }
  for (int h : row_hits) {
    if (h != 1) return {};
  }
  return perm;
}

}  // namespace

TileSystem build_tile_system(const ExposureCode& code) {
  const int n = code.tile_size();
  const int t_len = code.length();
  if (t_len != n * n)
    throw DimensionError("tile system requires T = N*N");

  TileSystem sys;
  sys.tile_size = n;
  sys.length = t_len;
  sys.permutation = permutation_of(code);
  if (sys.is_permutation()) return sys;

  Eigen::MatrixXd m(t_len, t_len);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      for (int t = 0; t < t_len; ++t) {
        m(y * n + x, t) = code.at(y, x, t);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw SingularSystemError("tile system is singular");
  sys.inverse = lu.inverse();
  const double residual =
      (m * sys.inverse - Eigen::MatrixXd::Identity(t_len, t_len)).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-10))
    throw SingularSystemError("tile system inverse residual too large");
  return sys;
}

LowResVideo recover_lowres_coded(const CodedImage& coded, const TiledCode& code) {
  if (coded.height() != code.height() || coded.width() != code.width())
    throw DimensionError("coded image dimensions must match the tiled code");
  const TileSystem sys = build_tile_system(code.base());
  const int n = sys.tile_size;
  const int t_len = sys.length;
  const int th = coded.height() / n;
  const int tw = coded.width() / n;

  std::vector<Image> frames(t_len, Image(th, tw));
  Eigen::VectorXd tile(t_len);
  Eigen::VectorXd solved(t_len);
  for (int u = 0; u < th; ++u) {
    for (int v = 0; v < tw; ++v) {
      // Unnormalized observations: coded values times activation count.
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          const int py = u * n + y;
          const int px = v * n + x;
          tile(y * n + x) = coded.values.at(py, px) * coded.activation_at(py, px);
        }
      }
      if (sys.is_permutation()) {
        for (int t = 0; t < t_len; ++t) frames[t].at(u, v) = clamp01(tile(sys.permutation[t]));
      } else {
        solved.noalias() = sys.inverse * tile;
        for (int t = 0; t < t_len; ++t) frames[t].at(u, v) = clamp01(solved(t));
      }
    }
  }
  return LowResVideo(std::move(frames));
}

LowResVideo pixel_shuffle_image(const FullyExposedImage& blurred, int tile_size) {
  const int n = tile_size;
  const int h = blurred.height();
  const int w = blurred.width();
  if (n <= 0 || h % n != 0 || w % n != 0)
    throw DimensionError("pixel shuffle: dimensions must be divisible by the tile size");
  const int t_len = n * n;
  const int th = h / n;
  const int tw = w / n;
  std::vector<Image> frames(t_len, Image(th, tw));
  for (int t = 0; t < t_len; ++t) {
    const int dy = t / n;
    const int dx = t % n;
    for (int u = 0; u < th; ++u) {
      for (int v = 0; v < tw; ++v) {
        frames[t].at(u, v) = blurred.values.at(u * n + dy, v * n + dx);
      }
    }
  }
  return LowResVideo(std::move(frames));
}

FullyExposedImage inverse_pixel_shuffle(const LowResVideo& video, int tile_size) {
  const int n = tile_size;
  if (video.length() != n * n)
    throw DimensionError("inverse pixel shuffle requires T = N*N");
  const int th = video.height();
  const int tw = video.width();
  FullyExposedImage out;
  out.values = Image(th * n, tw * n);
  for (int t = 0; t < video.length(); ++t) {
    const int dy = t / n;
    const int dx = t % n;
    for (int u = 0; u < th; ++u) {
      for (int v = 0; v < tw; ++v) {
        out.values.at(u * n + dy, v * n + dx) = video.at(u, v, t);
      }
    }
  }
  return out;
}

}  // namespace c2b

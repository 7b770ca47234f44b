#include "c2b/code.hpp"

#include <fstream>
#include <sstream>

namespace c2b {

ExposureCode::ExposureCode(int tile_size, int length, std::vector<uint8_t> mask)
    : n_(tile_size), t_(length), mask_(std::move(mask)) {
  if (n_ <= 0 || t_ <= 0) throw DimensionError("ExposureCode: N and T must be positive");
  if (mask_.size() != static_cast<size_t>(n_) * n_ * t_)
    throw DimensionError("ExposureCode: mask size must be N*N*T");
  for (uint8_t v : mask_) {
    if (v != 0 && v != 1) throw ValueError("ExposureCode: entries must be 0 or 1");
  }
  activation_.assign(static_cast<size_t>(n_) * n_, 0);
  for (int t = 0; t < t_; ++t) {
    for (int y = 0; y < n_; ++y) {
      for (int x = 0; x < n_; ++x) {
        activation_[static_cast<size_t>(y) * n_ + x] += at(y, x, t);
      }
    }
  }
  for (int a : activation_) {
    if (a == 0) throw DegenerateCodeError("ExposureCode: position never exposed");
  }
}

ExposureCode ExposureCode::impulse(int tile_size, int length) {
  if (length != tile_size * tile_size)
    throw DimensionError("impulse code requires T = N*N");
  std::vector<uint8_t> mask(static_cast<size_t>(tile_size) * tile_size * length, 0);
  // Frame t opens raster-order position t: (t div N, t mod N).
  for (int t = 0; t < length; ++t) {
    const int y = t / tile_size;
    const int x = t % tile_size;
    mask[(static_cast<size_t>(t) * tile_size + y) * tile_size + x] = 1;
  }
  return ExposureCode(tile_size, length, std::move(mask));
}

bool ExposureCode::is_impulse() const {
  if (t_ != n_ * n_) return false;
  for (int a : activation_) {
    if (a != 1) return false;
  }
  for (int t = 0; t < t_; ++t) {
    int active = 0;
    for (int y = 0; y < n_; ++y) {
      for (int x = 0; x < n_; ++x) active += at(y, x, t);
    }
    if (active != 1) return false;
  }
  return true;
}

TiledCode::TiledCode(ExposureCode base, int height, int width)
    : base_(std::move(base)), h_(height), w_(width) {
  const int n = base_.tile_size();
  if (h_ <= 0 || w_ <= 0) throw DimensionError("TiledCode: dimensions must be positive");
  if (h_ % n != 0 || w_ % n != 0)
    throw DimensionError("TiledCode: H and W must be divisible by the tile size");
}

TiledCode tile_code(const ExposureCode& code, int height, int width) {
  return TiledCode(code, height, width);
}

ExposureCode read_code_text(std::istream& in) {
  int n = 0;
  int t = 0;
  if (!(in >> n >> t)) throw IoError("code text: missing N T header");
  if (n <= 0 || t <= 0) throw IoError("code text: N and T must be positive");
  std::vector<uint8_t> mask;
  mask.reserve(static_cast<size_t>(n) * n * t);
  for (size_t i = 0; i < static_cast<size_t>(n) * n * t; ++i) {
    int v = 0;
    if (!(in >> v)) throw IoError("code text: truncated mask data");
    if (v != 0 && v != 1) throw IoError("code text: entries must be 0 or 1");
    mask.push_back(static_cast<uint8_t>(v));
  }
  return ExposureCode(n, t, std::move(mask));
}

ExposureCode read_code_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open code file: " + path);
  return read_code_text(in);
}

std::string format_code_text(const ExposureCode& code) {
  std::ostringstream out;
  const int n = code.tile_size();
  out << n << ' ' << code.length() << '\n';
  for (int t = 0; t < code.length(); ++t) {
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        out << int{code.at(y, x, t)} << (x + 1 == n ? "" : " ");
      }
      out << '\n';
    }
    if (t + 1 != code.length()) out << '\n';
  }
  return out.str();
}

void write_code_file(const ExposureCode& code, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write code file: " + path);
  out << format_code_text(code);
  if (!out) throw IoError("failed writing code file: " + path);
}

}  // namespace c2b

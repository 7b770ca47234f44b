#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "c2b/errors.hpp"

namespace c2b {

// N x N x T binary exposure code. Every spatial position must be exposed in
// at least one sub-exposure; entries are strictly 0 or 1.
class ExposureCode {
 public:
  // mask layout: (t * N + y) * N + x.
  ExposureCode(int tile_size, int length, std::vector<uint8_t> mask);

  static ExposureCode impulse(int tile_size, int length);

  int tile_size() const { return n_; }
  int length() const { return t_; }

  uint8_t at(int y, int x, int t) const {
    return mask_[(static_cast<size_t>(t) * n_ + y) * n_ + x];
  }

  // Number of sub-exposures position (y,x) is active in.
  int activation(int y, int x) const { return activation_[static_cast<size_t>(y) * n_ + x]; }

  // True when each position is active exactly once and each frame activates
  // exactly one position (requires T = N^2).
  bool is_impulse() const;

  const std::vector<uint8_t>& mask() const { return mask_; }

 private:
  int n_ = 0;
  int t_ = 0;
  std::vector<uint8_t> mask_;
  std::vector<int> activation_;
};

// Exposure code repeated spatially over an H x W sensor. Held as a view of
// the base code: mask(y,x,t) = base(y mod N, x mod N, t) by construction.
class TiledCode {
 public:
  TiledCode(ExposureCode base, int height, int width);

  int height() const { return h_; }
  int width() const { return w_; }
  int length() const { return base_.length(); }
  const ExposureCode& base() const { return base_; }

  uint8_t at(int y, int x, int t) const {
    return base_.at(y % base_.tile_size(), x % base_.tile_size(), t);
  }
  int activation(int y, int x) const {
    return base_.activation(y % base_.tile_size(), x % base_.tile_size());
  }

 private:
  ExposureCode base_;
  int h_ = 0;
  int w_ = 0;
};

inline ExposureCode make_impulse_code(int tile_size, int length) {
  return ExposureCode::impulse(tile_size, length);
}

TiledCode tile_code(const ExposureCode& code, int height, int width);

// Plain-text format: header "N T", then T blocks of N rows of N 0/1 digits.
ExposureCode read_code_text(std::istream& in);
ExposureCode read_code_file(const std::string& path);
std::string format_code_text(const ExposureCode& code);
void write_code_file(const ExposureCode& code, const std::string& path);

}  // namespace c2b

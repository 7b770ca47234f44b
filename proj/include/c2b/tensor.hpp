#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "c2b/errors.hpp"

namespace c2b {

// Rank-4 array, batch x channels x height x width, row-major innermost in x.
// Channel count zero is allowed (the empty half of a concatenation); the
// other dims must be positive. Convolution weights reuse the same layout as
// out_channels x in_channels x k x k.
template <typename S>
struct TensorT {
  int b = 0;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<S> data;

  TensorT() = default;
  TensorT(int b_, int c_, int h_, int w_, S fill = S(0))
      : b(b_), c(c_), h(h_), w(w_), data(check_numel(b_, c_, h_, w_), fill) {}

  static TensorT zeros_like(const TensorT& o) { return TensorT(o.b, o.c, o.h, o.w); }

  size_t numel() const { return data.size(); }

  S& at(int n, int ci, int y, int x) {
    return data[((static_cast<size_t>(n) * c + ci) * h + y) * w + x];
  }
  S at(int n, int ci, int y, int x) const {
    return data[((static_cast<size_t>(n) * c + ci) * h + y) * w + x];
  }

  bool same_shape(const TensorT& o) const {
    return b == o.b && c == o.c && h == o.h && w == o.w;
  }

  bool all_finite() const {
    for (S v : data) {
      if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
  }

  std::string shape_str() const {
    return std::to_string(b) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w);
  }

 private:
  static size_t check_numel(int b_, int c_, int h_, int w_) {
    if (b_ <= 0 || c_ < 0 || h_ <= 0 || w_ <= 0) {
      throw DimensionError("tensor dims must be positive (channels may be zero), got " +
                           std::to_string(b_) + "x" + std::to_string(c_) + "x" +
                           std::to_string(h_) + "x" + std::to_string(w_));
    }
    return static_cast<size_t>(b_) * c_ * h_ * w_;
  }
};

using Tensor = TensorT<float>;

// Named trainable array with its accumulated gradient.
template <typename S>
struct ParamT {
  std::string name;
  TensorT<S> value;
  TensorT<S> grad;

  ParamT() = default;
  ParamT(std::string name_, TensorT<S> value_)
      : name(std::move(name_)), value(std::move(value_)), grad(TensorT<S>::zeros_like(value)) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), S(0)); }
};

using Param = ParamT<float>;

}  // namespace c2b

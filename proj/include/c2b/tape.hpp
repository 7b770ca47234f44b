#pragma once

#include <functional>
#include <vector>

#include "c2b/tensor.hpp"

namespace c2b {

// Reverse-mode differentiation over a growing op record. Each op returns the
// id of its output node; backward() seeds the scalar loss with 1 and sweeps
// the record in reverse, so gradients land in node grads in one pass.
// Repeated backward calls accumulate additively into the persistent grads.
//
// All loops run in a fixed sequential order: identical inputs give
// bit-identical forward values and gradients.
template <typename S>
class TapeT {
 public:
  using Id = int;

  TapeT() = default;
  TapeT(const TapeT&) = delete;
  TapeT& operator=(const TapeT&) = delete;

  // Inserts an input or parameter value. Leaves have no backward step;
  // their grads simply collect what flows in.
  Id leaf(TensorT<S> value);

  const TensorT<S>& value(Id id) const { return nodes_[check(id)].value; }
  const TensorT<S>& grad(Id id) const { return nodes_[check(id)].grad; }
  int size() const { return static_cast<int>(nodes_.size()); }

  // Cross-correlation with bias, zero padding. weight is
  // out_channels x in_channels x k x k; bias is 1 x out_channels x 1 x 1.
  Id conv2d(Id input, Id weight, Id bias, int stride = 1, int pad = 1);
  Id relu(Id x);
  // 2x2 windows, stride 2; ties route the gradient to the first occurrence
  // in window raster order.
  Id maxpool2(Id x);
  // Nearest-neighbor 2x replication.
  Id upsample2(Id x);
  Id concat_channels(Id a, Id b);
  // Per-location channel cosine similarity, single-channel output in [-1,1].
  // Norms are floored at eps, so zero vectors are safe and identical inputs
  // give exactly 1.
  Id cosine_channels(Id a, Id b, S eps = S(1e-8));
  // Multiplies a single-channel map across all channels of x.
  Id broadcast_mul(Id map, Id x);
  // C*r^2 x H x W -> C x rH x rW with
  // out(c,y,x) = in(c*r^2 + (y mod r)*r + (x mod r), y div r, x div r).
  Id subpixel_upsample(Id x, int r);
  // Mean absolute difference (scalar). Subgradient at ties is 0.
  Id l1_loss(Id pred, Id target);
  // Mean |forward x-difference| plus mean |forward y-difference|, each mean
  // over its own valid set, summed over batch and channels. Scalar.
  Id tv_l1(Id x);
  // scale * x + shift, elementwise.
  Id affine(Id x, S scale, S shift);
  // Clamp to [0,1] with a pass-through gradient. Only guards values that sit
  // outside the unit interval by rounding error; not a general clamp.
  Id saturate01(Id x);
  // alpha * a + beta * b, elementwise.
  Id scale_add(Id a, S alpha, Id b, S beta);
  // Scalar probe sum(x * probe); lets tests and gradient checks build a
  // scalar objective from any node.
  Id inner(Id x, TensorT<S> probe);

  // Seeds d(loss)/d(loss) = 1 and accumulates gradients for every node that
  // feeds the loss. The loss must be scalar and live on this tape.
  void backward(Id loss);

 private:
  struct Node {
    TensorT<S> value;
    TensorT<S> grad;
    // Reads its output slot in the per-call gradient buffer and adds into
    // its inputs' slots. Null for leaves.
    std::function<void(std::vector<TensorT<S>>&)> back;
  };

  Id check(Id id) const;
  Id push(TensorT<S> value, std::function<void(std::vector<TensorT<S>>&)> back);

  std::vector<Node> nodes_;
};

extern template class TapeT<float>;
extern template class TapeT<double>;

using Tape = TapeT<float>;

}  // namespace c2b

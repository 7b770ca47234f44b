#pragma once

#include <cstdint>
#include <vector>

#include "c2b/tensor.hpp"

namespace c2b {

template <typename S>
struct AdamConfigT {
  S lr = S(1e-4);
  S beta1 = S(0.9);
  S beta2 = S(0.999);
  S eps = S(1e-8);
};

// Bias-corrected Adam. Moment buffers are keyed by parameter position, so
// every step must see the same parameter list in the same order; shapes are
// revalidated on each call.
template <typename S>
class AdamT {
 public:
  AdamT(AdamConfigT<S> config, const std::vector<ParamT<S>>& params);

  // Applies one update from the accumulated grads and increments the step.
  void step(std::vector<ParamT<S>>& params);

  int64_t steps() const { return step_; }
  const AdamConfigT<S>& config() const { return config_; }
  const std::vector<TensorT<S>>& first_moments() const { return m_; }
  const std::vector<TensorT<S>>& second_moments() const { return v_; }

  // Restores state saved in a checkpoint. Shapes must match the parameters
  // this optimizer was built for.
  void set_state(std::vector<TensorT<S>> m, std::vector<TensorT<S>> v, int64_t step);

 private:
  AdamConfigT<S> config_;
  std::vector<TensorT<S>> m_;
  std::vector<TensorT<S>> v_;
  int64_t step_ = 0;
};

extern template class AdamT<float>;
extern template class AdamT<double>;

using Adam = AdamT<float>;

}  // namespace c2b

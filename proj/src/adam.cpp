#include "c2b/adam.hpp"

#include <cmath>
#include <string>

namespace c2b {

template <typename S>
AdamT<S>::AdamT(AdamConfigT<S> config, const std::vector<ParamT<S>>& params) : config_(config) {
  if (!(config_.lr > S(0))) throw ValueError("adam: learning rate must be positive");
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const ParamT<S>& p : params) {
    m_.push_back(TensorT<S>::zeros_like(p.value));
    v_.push_back(TensorT<S>::zeros_like(p.value));
  }
}

template <typename S>
void AdamT<S>::step(std::vector<ParamT<S>>& params) {
  if (params.size() != m_.size()) {
    throw ValueError("adam: parameter count changed since state was created");
  }
  ++step_;
  const S bc1 = static_cast<S>(1.0 - std::pow(static_cast<double>(config_.beta1),
                                              static_cast<double>(step_)));
  const S bc2 = static_cast<S>(1.0 - std::pow(static_cast<double>(config_.beta2),
                                              static_cast<double>(step_)));
  for (size_t i = 0; i < params.size(); ++i) {
    ParamT<S>& p = params[i];
    if (!p.value.same_shape(m_[i])) {
      throw DimensionError("adam: state shape mismatch for parameter " + p.name);
    }
    for (size_t j = 0; j < p.value.data.size(); ++j) {
      const S g = p.grad.data[j];
      m_[i].data[j] = config_.beta1 * m_[i].data[j] + (S(1) - config_.beta1) * g;
      v_[i].data[j] = config_.beta2 * v_[i].data[j] + (S(1) - config_.beta2) * g * g;
      const S m_hat = m_[i].data[j] / bc1;
      const S v_hat = v_[i].data[j] / bc2;
      p.value.data[j] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

template <typename S>
void AdamT<S>::set_state(std::vector<TensorT<S>> m, std::vector<TensorT<S>> v, int64_t step) {
  if (m.size() != m_.size() || v.size() != v_.size() || step < 0) {
    throw ValueError("adam: restored state does not match this optimizer");
  }
  for (size_t i = 0; i < m.size(); ++i) {
    if (!m[i].same_shape(m_[i]) || !v[i].same_shape(v_[i])) {
      throw DimensionError("adam: restored moment shapes do not match parameters");
    }
  }
  m_ = std::move(m);
  v_ = std::move(v);
  step_ = step;
}

template class AdamT<float>;
template class AdamT<double>;

}  // namespace c2b

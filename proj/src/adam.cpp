#include "tot/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tot {

void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg) {
  const std::size_t n = params.size();
  if (grad.size() != n || state.m.size() != n || state.v.size() != n) {
    throw std::invalid_argument("adam_step: parameter/gradient/state size mismatch");
  }
  state.step += 1;
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

}  // namespace tot

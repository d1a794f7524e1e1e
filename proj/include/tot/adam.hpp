#pragma once

#include <cstdint>
#include <vector>

namespace tot {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Per-parameter moment accumulators plus the step counter.
struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One bias-corrected update. params, grad and the state moments must all
// have the same length; throws std::invalid_argument otherwise.
void adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg);

}  // namespace tot

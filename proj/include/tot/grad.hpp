#pragma once

#include <array>
#include <span>
#include <vector>

#include "tot/common.hpp"
#include "tot/model.hpp"

namespace tot {

// Which objective the gradient is taken of. L1 pairs with point take-over
// heads, MinOfK with multimodal heads, Mse with the readiness head;
// batch_gradient rejects any other pairing.
enum class LossKind { L1, MinOfK, Mse };

// Non-owning view of one training sample. `targets` carries the three
// component times; for LossKind::Mse only targets[0] (the readiness label)
// is read.
struct SampleView {
  const double* window = nullptr;
  int rows = 0;
  int cols = 0;
  std::array<double, 3> targets{};
};

struct GradResult {
  double loss = 0.0;         // batch mean
  std::vector<double> grad;  // d loss / d params, matching model.params
};

// Samples are reduced in fixed blocks of this many, and block partials are
// summed in block order, so the result is bitwise identical for Serial and
// Parallel execution at any thread count.
inline constexpr int kGradBlockSamples = 8;

// Exact batch-mean gradient via backpropagation through time over every
// window row. The min-of-K regression term routes its subgradient through
// the selected mode only; L1 uses subgradient 0 at zero residual. Throws
// std::invalid_argument on an empty batch, shape mismatch, or a loss kind
// that does not match the model head, and NumericError if any sample's
// loss is non-finite.
GradResult batch_gradient(const Model& m, std::span<const SampleView> batch,
                          LossKind kind,
                          ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace tot

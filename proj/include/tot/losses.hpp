#pragma once

#include <array>
#include <span>

#include "tot/model.hpp"

namespace tot {

// Summed absolute error of a point prediction's triple against the targets.
// The batch form returns the mean over samples. Throws std::invalid_argument
// when handed a multimodal prediction.
double loss_l1(const Prediction& pred, const std::array<double, 3>& targets);
double loss_l1(std::span<const Prediction> preds,
               std::span<const std::array<double, 3>> targets);

// Per-sample pieces of the min-of-K loss: the best mode's summed L1, the
// cross-entropy of the mode distribution against the one-hot indicator of
// that mode, and which mode won (ties to the lowest index).
struct MinOfKParts {
  double regression = 0.0;
  double classification = 0.0;
  int argmin_mode = 0;
};

// The probability entering the log is floored at this value so a collapsed
// mode distribution yields a large finite loss instead of infinity.
inline constexpr double kModeProbFloor = 1e-9;

MinOfKParts min_of_k_parts(const Prediction& pred,
                           const std::array<double, 3>& targets);

// regression + classification; batch form returns the mean over samples.
// Throws std::invalid_argument when handed a point prediction.
double loss_min_of_k(const Prediction& pred,
                     const std::array<double, 3>& targets);
double loss_min_of_k(std::span<const Prediction> preds,
                     std::span<const std::array<double, 3>> targets);

}  // namespace tot

#include "tot/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace tot {

namespace {

double summed_l1(const std::array<double, 3>& a,
                 const std::array<double, 3>& b) {
  return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

}  // namespace

double loss_l1(const Prediction& pred, const std::array<double, 3>& targets) {
  if (pred.multimodal()) {
    throw std::invalid_argument(
        "loss_l1 expects a point prediction; use loss_min_of_k for "
        "multimodal variants");
  }
  return summed_l1(pred.times, targets);
}

double loss_l1(std::span<const Prediction> preds,
               std::span<const std::array<double, 3>> targets) {
  if (preds.size() != targets.size()) {
    throw std::invalid_argument("loss_l1: prediction/target count mismatch");
  }
  if (preds.empty()) throw std::invalid_argument("loss_l1: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total += loss_l1(preds[i], targets[i]);
  }
  return total / static_cast<double>(preds.size());
}

MinOfKParts min_of_k_parts(const Prediction& pred,
                           const std::array<double, 3>& targets) {
  if (!pred.multimodal()) {
    throw std::invalid_argument(
        "loss_min_of_k expects a multimodal prediction; use loss_l1 for "
        "point variants");
  }
  MinOfKParts parts;
  double best = summed_l1(pred.mode(0), targets);
  for (int k = 1; k < pred.num_modes(); ++k) {
    const double e = summed_l1(pred.mode(k), targets);
    if (e < best) {
      best = e;
      parts.argmin_mode = k;
    }
  }
  parts.regression = best;
  const double q =
      pred.mode_probs[static_cast<std::size_t>(parts.argmin_mode)];
  parts.classification = -std::log(std::max(q, kModeProbFloor));
  return parts;
}

double loss_min_of_k(const Prediction& pred,
                     const std::array<double, 3>& targets) {
  const MinOfKParts parts = min_of_k_parts(pred, targets);
  return parts.regression + parts.classification;
}

double loss_min_of_k(std::span<const Prediction> preds,
                     std::span<const std::array<double, 3>> targets) {
  if (preds.size() != targets.size()) {
    throw std::invalid_argument(
        "loss_min_of_k: prediction/target count mismatch");
  }
  if (preds.empty()) throw std::invalid_argument("loss_min_of_k: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    total += loss_min_of_k(preds[i], targets[i]);
  }
  return total / static_cast<double>(preds.size());
}

}  // namespace tot

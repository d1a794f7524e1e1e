#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tot/adam.hpp"
#include "tot/augment.hpp"
#include "tot/grad.hpp"
#include "tot/model.hpp"
#include "tot/synth.hpp"

namespace tot {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 64;
  AdamConfig adam;
  std::uint64_t seed = 0;  // shuffling order; model init uses ModelConfig.seed
  ExecPolicy policy = ExecPolicy::Parallel;
  bool verbose = false;  // one progress line per epoch on stderr
};

struct EpochStats {
  int epoch = 0;           // 1-based
  double train_loss = 0.0; // epoch mean of the training objective
  // Validation MAEs after the epoch; NaN when no validation set was given.
  // For readiness pretraining val_overall_mae_s holds the readiness MAE and
  // val_takeover_mae_s is NaN.
  double val_overall_mae_s = 0.0;
  double val_takeover_mae_s = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochStats> history;  // exactly `epochs` entries
};

// Fresh model from (config, mask), then minibatch Adam with per-epoch
// shuffling. The loss follows the variant: summed-L1 for point heads,
// min-of-K for multimodal heads. Deterministic given the two seeds.
// Throws std::invalid_argument on an empty train set or when sample widths
// do not match config.input_dim.
TrainResult train(std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set,
                  const ModelConfig& config, const FeatureMask& mask,
                  const TrainConfig& tc);

// Same loop from an existing take-over-time model (fine-tuning).
TrainResult train_from(Model model, std::span<const TrainingSample> train_set,
                       std::span<const TrainingSample> val_set,
                       const TrainConfig& tc);

// Readiness pretraining: scalar sigmoid head trained with MSE on the
// window labels. Labels must lie in [0,1].
TrainResult pretrain_ori(std::span<const OriSample> train_set,
                         std::span<const OriSample> val_set,
                         const ModelConfig& config, const FeatureMask& mask,
                         const TrainConfig& tc);

// New take-over-time model for `config` with the trunk (input transform and
// every LSTM cell) copied bit-exactly from the pretrained model and the
// head freshly initialized. Throws std::invalid_argument when the trunks
// are incompatible (different cell count, hidden_dim, input_dim, or mask).
Model transfer(const Model& pretrained, const ModelConfig& config);

}  // namespace tot
